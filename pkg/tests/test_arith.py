from fractions import Fraction

import pytest

from pmvforge.core.arith import Inconsistent
from pmvforge.core.arith import Solution
from pmvforge.core.arith import Underdetermined
from pmvforge.core.arith import dot
from pmvforge.core.arith import format_fraction
from pmvforge.core.arith import matrix
from pmvforge.core.arith import orthogonal_complement
from pmvforge.core.arith import rank
from pmvforge.core.arith import solve_linear
from pmvforge.core.arith import to_fraction


@pytest.mark.parametrize(
    "value, expected",
    [
        (3, Fraction(3)),
        ("3/6", Fraction(1, 2)),
        (" -2/4 ", Fraction(-1, 2)),
        (0.1, Fraction(1, 10)),
        (Fraction(2, 3), Fraction(2, 3)),
    ],
)
def test_to_fraction(value, expected):
    assert to_fraction(value) == expected


@pytest.mark.parametrize(
    "value",
    ["abc", "1/0", float("nan"), float("inf"), True],
)
def test_to_fraction_errors(value):
    with pytest.raises(ValueError, match="rational number"):
        to_fraction(value)


@pytest.mark.parametrize(
    "value, expected",
    [
        (Fraction(4, 6), "2/3"),
        (Fraction(-4, 2), "-2"),
        (0, "0"),
    ],
)
def test_format_fraction(value, expected):
    assert format_fraction(value) == expected
    assert to_fraction(format_fraction(value)) == value


def test_matrix():
    assert matrix([[1, 2], ["1/2", 0]]) == (
        (Fraction(1), Fraction(2)),
        (Fraction(1, 2), Fraction(0)),
    )
    assert matrix([], num_cols=3) == ()
    with pytest.raises(ValueError, match="same length"):
        matrix([[1, 2], [1]])
    with pytest.raises(ValueError, match="same length"):
        matrix([[1, 2]], num_cols=3)


def test_dot():
    assert dot([1, "1/2"], [2, 4]) == 4
    with pytest.raises(ValueError, match="length 2 and 1"):
        dot([1, 2], [1])


@pytest.mark.parametrize(
    "mat, expected",
    [
        ([], 0),
        ([[0, 0]], 0),
        ([[1, 2], [2, 4]], 1),
        ([[1, 1, 0], [0, 1, 1], [1, 2, 1]], 2),
        ([["1/2", 0], [0, "1/3"]], 2),
    ],
)
def test_rank(mat, expected):
    assert rank(mat) == expected


def test_solve_linear():
    result = solve_linear([[2, 1], [1, -1]], [3, 0])
    assert result == Solution((Fraction(1), Fraction(1)))

    assert solve_linear([[1, 1], [2, 2]], [1, 3]) == Inconsistent()

    result = solve_linear([[1, 1]], [2])
    assert isinstance(result, Underdetermined)
    assert len(result.nullspace) == 1
    assert dot([1, 1], result.particular) == 2
    assert dot([1, 1], result.nullspace[0]) == 0

    with pytest.raises(ValueError, match="right-hand side"):
        solve_linear([[1, 0]], [1, 2])


def test_orthogonal_complement():
    basis = orthogonal_complement([[1, 1, 0]], 3)
    assert len(basis) == 2
    assert rank(basis) == 2
    for v in basis:
        assert dot(v, [1, 1, 0]) == 0
    assert len(orthogonal_complement([], 2)) == 2
    assert orthogonal_complement([[1, 0], [0, 1]], 2) == []
    with pytest.raises(ValueError, match="length 2"):
        orthogonal_complement([[1, 0, 0]], 2)
