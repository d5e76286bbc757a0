from fractions import Fraction

import numpy as np
import pytest

from pmvforge.core.polyhedra import BudgetThreshold
from pmvforge.core.polyhedra import Polyhedron
from pmvforge.core.polyhedra import build_cone
from pmvforge.core.polyhedra import build_hull
from pmvforge.core.polyhedra import characteristic_cone
from pmvforge.core.polyhedra import cone_dimension
from pmvforge.core.polyhedra import hull_intersection
from pmvforge.core.polyhedra import implicit_equalities
from pmvforge.core.polyhedra import min_budget
from pmvforge.core.polyhedra import mixture
from pmvforge.core.polyhedra import points
from pmvforge.core.polyhedra import projected_dimension


def test_polyhedron():
    p = Polyhedron([[1, -1], [0, -1]], [0, "1/2"])
    assert p.dim == 2
    assert len(p) == 2
    assert not p.is_homogeneous
    assert p.contains([0, 0])
    assert not p.contains([1, 0])
    assert not p.is_empty()
    assert p.rows()[1] == ((Fraction(0), Fraction(-1)), Fraction(1, 2))
    assert Polyhedron.from_dict(p.to_dict(), 2) == p
    assert p.to_dict() == {"A": [["1", "-1"], ["0", "-1"]], "b": ["0", "1/2"]}

    empty = p.intersect(Polyhedron([[-1, 1]], [-1]))
    assert len(empty) == 3
    assert empty.is_empty()

    unconstrained = Polyhedron([], [], 3)
    assert unconstrained.dim == 3
    assert unconstrained.contains([5, -5, 0])


def test_polyhedron_errors():
    with pytest.raises(ValueError, match="has 1 rows"):
        Polyhedron([[1, 0]], [0, 1])
    with pytest.raises(ValueError, match="without rows is unknown"):
        Polyhedron([], [])
    with pytest.raises(ValueError, match="dimension 2 and 3"):
        Polyhedron([[1, 0]], [0]).intersect(Polyhedron([[1, 0, 0]], [0]))


def test_characteristic_cone():
    cone = characteristic_cone(Polyhedron([[1, 1], [-1, 0]], [3, -1]))
    assert cone.is_homogeneous
    assert cone.A == ((Fraction(1), Fraction(1)), (Fraction(-1), Fraction(0)))


@pytest.mark.parametrize(
    "A, implicit, dimension",
    [
        ([[1, 0], [-1, 0]], {0, 1}, 1),
        ([[1, -1], [-1, 1]], {0, 1}, 1),
        ([[-1, 0], [0, -1]], set(), 2),
        # x = y = z from three cyclic rows
        ([[1, -1, 0], [0, 1, -1], [-1, 0, 1]], {0, 1, 2}, 1),
        (
            [[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]],
            {0, 1, 2, 3, 4, 5},
            0,
        ),
    ],
)
def test_cone_dimension(A, implicit, dimension):
    cone = Polyhedron(A, [0] * len(A))
    assert implicit_equalities(cone) == implicit
    assert cone_dimension(cone) == dimension


def test_cone_dimension_error():
    with pytest.raises(ValueError, match="Expected a cone"):
        cone_dimension(Polyhedron([[1, 0]], [1]))


def test_build_cone(toy):
    zero = build_cone(toy, "zero")
    assert zero.q == 2
    assert zero.num_ops == 0
    assert zero.is_homogeneous
    assert cone_dimension(zero.polyhedron) == 1

    infinity = build_cone(toy, "infinity")
    assert infinity.num_ops == 1
    assert infinity.is_homogeneous
    assert projected_dimension(infinity) == 2

    budget = build_cone(toy, "budget", budget="1/2")
    assert budget.budget == Fraction(1, 2)
    assert not budget.is_homogeneous
    assert len(budget.polyhedron) == len(infinity.polyhedron) + 1

    with pytest.raises(ValueError, match="Unknown cone 'other'"):
        build_cone(toy, "other")
    with pytest.raises(ValueError, match="needs a budget"):
        build_cone(toy, "budget")
    with pytest.raises(ValueError, match="non-negative"):
        build_cone(toy, "budget", budget=-1)


def test_build_hull(toy):
    hull = build_hull(toy)
    assert hull.budget is None
    # (5, 5) with one operation reaches (6, 4)
    assert hull.polyhedron.contains([5, 5, 1])
    assert not hull.polyhedron.contains([5, 5, 0])
    bounded = build_hull(toy, 1)
    assert bounded.polyhedron.contains([5, 5, 1])
    assert not bounded.polyhedron.contains([4, 6, 2])
    infinity = build_cone(toy, "infinity").polyhedron
    assert characteristic_cone(hull.polyhedron) == infinity
    with pytest.raises(ValueError, match="non-negative"):
        build_hull(toy, "-1/2")


def test_build_hull_rays(toy):
    hull = build_hull(toy).polyhedron
    cone = characteristic_cone(hull)
    rng = np.random.default_rng(1)
    rays = []
    while len(rays) < 100:
        ray = [int(v) for v in rng.integers(-10, 11, size=hull.dim)]
        if any(ray) and cone.contains(ray):
            rays.append(ray)
    y = [5, 5, 1]
    for ray in rays:
        for t in [1, 10, 100]:
            assert hull.contains([a + t * r for a, r in zip(y, ray)])


def test_points():
    assert points([["1/2", "1/2"]]) == (pytest.HALF,)
    with pytest.raises(ValueError, match="At least one"):
        points([])
    with pytest.raises(ValueError, match="same number of entries"):
        points([[1, 0], [1, 0, 0]])


def test_mixture():
    assert mixture([Fraction(1, 4), Fraction(3, 4)], [pytest.LEFT, pytest.RIGHT]) == (
        pytest.HALF
    )


@pytest.mark.parametrize(
    "vertices, expected",
    [
        ([pytest.HALF], (Fraction(1),)),
        ([pytest.LEFT], None),
        ([pytest.RIGHT], None),
        ([pytest.LEFT, pytest.RIGHT], (Fraction(1, 4), Fraction(3, 4))),
    ],
)
def test_hull_intersection(toy, vertices, expected):
    alpha = hull_intersection(build_cone(toy, "zero"), vertices)
    assert alpha == expected


def test_hull_intersection_error(toy):
    with pytest.raises(ValueError, match="have 3 entries, expected 2"):
        hull_intersection(build_cone(toy, "zero"), [[1, 0, 0]])


@pytest.mark.parametrize(
    "vertices, mode, expected",
    [
        ([pytest.HALF], "touch", Fraction(0)),
        ([pytest.RIGHT], "touch", Fraction(1, 10)),
        ([pytest.LEFT], "touch", None),
        ([pytest.LEFT, pytest.RIGHT], "touch", Fraction(0)),
        ([pytest.HALF, pytest.RIGHT], "cover", Fraction(1, 10)),
        ([pytest.LEFT, pytest.RIGHT], "cover", None),
    ],
)
def test_min_budget(toy, vertices, mode, expected):
    threshold = min_budget(toy, vertices, mode)
    assert threshold.value == expected
    assert threshold.is_infinite == (expected is None)
    if expected is not None:
        point, ops = threshold.witness
        assert sum(point) == 1
        assert sum(ops) == expected


def test_min_budget_error(toy):
    with pytest.raises(ValueError, match="Unknown mode 'half'"):
        min_budget(toy, [pytest.HALF], "half")


@pytest.mark.parametrize(
    "threshold, expected",
    [
        (BudgetThreshold(None), "inf"),
        (BudgetThreshold(Fraction(1, 10)), "1/10"),
        (BudgetThreshold(Fraction(2)), "2"),
    ],
)
def test_budget_threshold_str(threshold, expected):
    assert str(threshold) == expected
