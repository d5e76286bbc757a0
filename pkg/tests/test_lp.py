from fractions import Fraction

import pytest

from pmvforge.core.lp import LinearProgram
from pmvforge.core.lp import SearchExhaustedError
from pmvforge.core.lp import ilp_feasible
from pmvforge.core.lp import lp_solve


def test_linear_program_validation():
    with pytest.raises(ValueError, match="Constraint row has 1 entries"):
        LinearProgram(2, inequalities=[([1], 1)])
    with pytest.raises(ValueError, match="Objective has 3 entries"):
        LinearProgram(2, objective=[1, 1, 1])
    with pytest.raises(ValueError, match="Upper bounds have 1 entries"):
        LinearProgram(2, upper=[1])
    with pytest.raises(ValueError, match="exceeds its upper bound"):
        LinearProgram(1, lower=[2], upper=[1])
    with pytest.raises(ValueError, match="non-negative"):
        LinearProgram(-1)


def test_is_feasible():
    prog = LinearProgram(
        2,
        inequalities=[([1, 1], 2)],
        equalities=[([1, -1], 0)],
        lower=[0, 0],
    )
    assert prog.is_feasible([1, 1])
    assert not prog.is_feasible([2, 2])
    assert not prog.is_feasible([1, 0])
    assert not prog.is_feasible([-1, -1])
    assert not prog.is_feasible([1])


@pytest.mark.parametrize(
    "prog, status, value",
    [
        (
            # max x + y  s.t.  x + 2y <= 4, 3x + y <= 6, x, y >= 0
            LinearProgram(
                2,
                inequalities=[([1, 2], 4), ([3, 1], 6)],
                objective=[1, 1],
                lower=[0, 0],
            ),
            "optimal",
            Fraction(14, 5),
        ),
        (
            LinearProgram(
                2,
                inequalities=[([1, -1], 0)],
                objective=[1, 1],
                lower=[0, 0],
            ),
            "unbounded",
            None,
        ),
        (
            LinearProgram(
                1,
                inequalities=[([1], -1)],
                objective=[1],
                lower=[0],
            ),
            "infeasible",
            None,
        ),
        (
            # free variable with equality
            LinearProgram(
                1,
                equalities=[([2], -3)],
                objective=[1],
            ),
            "optimal",
            Fraction(-3, 2),
        ),
        (
            # bounded variables only
            LinearProgram(
                2,
                objective=[1, -1],
                lower=[0, "1/2"],
                upper=["3/2", 2],
            ),
            "optimal",
            Fraction(1),
        ),
    ],
)
def test_lp_solve(prog, status, value):
    outcome = lp_solve(prog)
    assert outcome.status == status
    if status == "optimal":
        assert outcome.value == value
        assert prog.is_feasible(outcome.witness)


def test_lp_solve_feasibility():
    prog = LinearProgram(
        3,
        inequalities=[([1, 1, 1], 1), ([-1, 0, 0], "-1/3")],
        lower=[0, 0, 0],
    )
    outcome = lp_solve(prog)
    assert outcome.status == "optimal"
    assert outcome.value == 0
    assert prog.is_feasible(outcome.witness)


def test_lp_solve_degenerate():
    # Cone through the origin with redundant rows
    prog = LinearProgram(
        3,
        inequalities=[
            ([1, -1, 0], 0),
            ([0, 1, -1], 0),
            ([1, 0, -1], 0),
            ([1, -1, 0], 0),
            ([1, 1, 1], 3),
        ],
        objective=[1, 0, 0],
        lower=[0, 0, 0],
    )
    outcome = lp_solve(prog)
    assert outcome.status == "optimal"
    assert outcome.value == 1
    assert prog.is_feasible(outcome.witness)


@pytest.mark.parametrize(
    "prog, integer_vars, feasible",
    [
        (
            LinearProgram(1, equalities=[([2], 1)], lower=[0], upper=[1]),
            [0],
            False,
        ),
        (
            # 2x + 2y = 3 has no integer solution
            LinearProgram(
                2,
                equalities=[([2, 2], 3)],
                lower=[0, 0],
                upper=[5, 5],
            ),
            [0, 1],
            False,
        ),
        (
            LinearProgram(
                2,
                inequalities=[([3, 2], 7), ([-3, -2], -7)],
                lower=[0, 0],
                upper=[5, 5],
            ),
            [0, 1],
            True,
        ),
        (
            # continuous second variable
            LinearProgram(
                2,
                equalities=[([1, 1], "5/2")],
                lower=[0, 0],
                upper=[1, None],
            ),
            [0],
            True,
        ),
        (
            LinearProgram(1, lower=["1/3"], upper=["2/3"]),
            [0],
            False,
        ),
    ],
)
def test_ilp_feasible(prog, integer_vars, feasible):
    x = ilp_feasible(prog, integer_vars)
    if feasible:
        assert x is not None
        assert prog.is_feasible(x)
        for j in integer_vars:
            assert x[j].denominator == 1
    else:
        assert x is None


def test_ilp_feasible_errors():
    prog = LinearProgram(1, lower=[0])
    with pytest.raises(ValueError, match="finite lower and upper bound"):
        ilp_feasible(prog, [0])
    with pytest.raises(ValueError, match="out of range"):
        ilp_feasible(LinearProgram(1, lower=[0], upper=[1]), [1])


def test_ilp_feasible_node_limit():
    # Parity constraint forces exhaustive branching
    prog = LinearProgram(
        3,
        equalities=[([2, 2, 2], 7)],
        lower=[0, 0, 0],
        upper=[10, 10, 10],
    )
    with pytest.raises(SearchExhaustedError, match="after 1 nodes"):
        ilp_feasible(prog, [0, 1, 2], node_limit=1)
    assert ilp_feasible(prog, [0, 1, 2]) is None
