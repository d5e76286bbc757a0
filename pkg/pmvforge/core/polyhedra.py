from collections.abc import Sequence
import dataclasses
from fractions import Fraction
import typing

from pmvforge.core import define
from pmvforge.core import utils
from pmvforge.core.arith import Matrix
from pmvforge.core.arith import Vector
from pmvforge.core.arith import dot
from pmvforge.core.arith import format_fraction
from pmvforge.core.arith import matrix
from pmvforge.core.arith import orthogonal_complement
from pmvforge.core.arith import rank
from pmvforge.core.arith import to_fraction
from pmvforge.core.arith import unit
from pmvforge.core.arith import vector
from pmvforge.core.arith import zeros
from pmvforge.core.lp import LinearProgram
from pmvforge.core.lp import lp_solve


if typing.TYPE_CHECKING:  # pragma: no cover
    from pmvforge.core.settings import PmvSetting


ZERO_CONE = "zero"
INFINITY_CONE = "infinity"
BUDGET_CONE = "budget"


@dataclasses.dataclass(frozen=True)
class Polyhedron:
    r"""Polyhedron :math:`\{x : Ax \le b\}`.

    Args:
        A: constraint matrix
        b: right-hand side
        dim: dimension of the ambient space,
            required if ``A`` has no rows

    Raises:
        ValueError: if the number of rows in ``A`` and entries in ``b`` differ,
            or the dimension cannot be determined

    Examples:
        >>> p = Polyhedron([[1, -1]], [0])
        >>> p.dim
        2
        >>> p.contains([1, 2])
        True

    """

    A: Matrix
    b: Vector
    dim: int | None = None

    def __post_init__(self):
        A = matrix(self.A, num_cols=self.dim)
        b = vector(self.b)
        if len(A) != len(b):
            raise ValueError(
                f"Constraint matrix has {len(A)} rows, "
                f"but right-hand side has {len(b)} entries."
            )
        dim = self.dim
        if dim is None:
            if not A:
                raise ValueError("Dimension of a polyhedron without rows is unknown.")
            dim = len(A[0])
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "dim", dim)

    def __len__(self) -> int:  # noqa: D105
        return len(self.A)

    @property
    def is_homogeneous(self) -> bool:
        r"""``True`` if every right-hand side is zero."""
        return not any(self.b)

    def contains(self, x: Sequence) -> bool:
        r"""Check exactly whether ``x`` lies in the polyhedron."""
        return all(dot(a, x) <= b for a, b in zip(self.A, self.b))

    def is_empty(self) -> bool:
        r"""Check emptiness with a feasibility LP."""
        outcome = lp_solve(LinearProgram(self.dim, inequalities=self.rows()))
        return outcome.status == define.INFEASIBLE

    def rows(self) -> list[tuple[Vector, Fraction]]:
        r"""Constraint rows as ``(a, b)`` pairs."""
        return list(zip(self.A, self.b))

    def intersect(self, other: "Polyhedron") -> "Polyhedron":
        r"""Intersection with a polyhedron of the same dimension.

        Raises:
            ValueError: if dimensions differ

        """
        if self.dim != other.dim:
            raise ValueError(
                f"Cannot intersect polyhedra of dimension {self.dim} and {other.dim}."
            )
        return Polyhedron(self.A + other.A, self.b + other.b, self.dim)

    def to_dict(self) -> dict:
        r"""Serialize with rationals as strings."""
        return {
            "A": [[format_fraction(v) for v in row] for row in self.A],
            "b": [format_fraction(v) for v in self.b],
        }

    @classmethod
    def from_dict(cls, data: dict, dim: int) -> "Polyhedron":
        r"""Inverse of :meth:`to_dict`."""
        return cls(data["A"], data["b"], dim)


@dataclasses.dataclass(frozen=True)
class LiftedCone:
    r"""Polyhedron over stacked variables :math:`(x, o)`.

    The first ``q`` coordinates are the histogram block,
    the remaining ``num_ops`` coordinates count vote operations.
    ``budget`` is set
    if the polyhedron contains the budget row :math:`c \cdot o \le B`.

    """

    polyhedron: Polyhedron
    q: int
    num_ops: int
    budget: Fraction | None = None

    @property
    def is_homogeneous(self) -> bool:
        r"""``True`` if the set is a cone."""
        return self.polyhedron.is_homogeneous


@dataclasses.dataclass(frozen=True)
class BudgetThreshold:
    r"""Minimum budget of a touch or cover query.

    ``value`` is ``None`` if no budget suffices.
    ``witness`` holds a point of the distribution hull
    and the operation counts attaining the value.

    """

    value: Fraction | None
    witness: tuple[Vector, Vector] | None = None

    @property
    def is_infinite(self) -> bool:
        r"""``True`` if no finite budget suffices."""
        return self.value is None

    def __str__(self) -> str:  # noqa: D105
        return "inf" if self.value is None else format_fraction(self.value)


def characteristic_cone(polyhedron: Polyhedron) -> Polyhedron:
    r"""Characteristic cone of a polyhedron.

    Args:
        polyhedron: polyhedron :math:`\{x : Ax \le b\}`

    Returns:
        cone :math:`\{x : Ax \le 0\}`

    Examples:
        >>> characteristic_cone(Polyhedron([[1]], [5])).b
        (Fraction(0, 1),)

    """
    return Polyhedron(polyhedron.A, zeros(len(polyhedron)), polyhedron.dim)


def _check_homogeneous(cone: Polyhedron):
    if not cone.is_homogeneous:
        raise ValueError("Expected a cone, but right-hand side is not zero.")


def _is_implicit(cone: Polyhedron, index: int) -> bool:
    rows = cone.rows()
    rows.append((cone.A[index], Fraction(-1)))
    outcome = lp_solve(LinearProgram(cone.dim, inequalities=rows))
    return outcome.status == define.INFEASIBLE


def implicit_equalities(
    cone: Polyhedron,
    *,
    verbose: bool = False,
) -> set[int]:
    r"""Rows holding with equality on the whole cone.

    Row :math:`i` is implicit
    if :math:`\{Ax \le 0, a_i \cdot x \le -1\}` is infeasible.
    One LP is solved per row.

    Args:
        cone: polyhedron with zero right-hand side
        verbose: show progress bar

    Returns:
        indices of implicit rows

    Raises:
        ValueError: if ``cone`` is not homogeneous

    Examples:
        >>> implicit_equalities(Polyhedron([[1, 0], [-1, 0]], [0, 0]))
        {0, 1}

    """
    _check_homogeneous(cone)
    results = utils.run_tasks(
        _is_implicit,
        [([cone, i], {}) for i in range(len(cone))],
        verbose=verbose,
        task_description="Implicit equalities",
    )
    return {i for i, implicit in enumerate(results) if implicit}


def cone_dimension(
    cone: Polyhedron,
    *,
    verbose: bool = False,
) -> int:
    r"""Dimension of a polyhedral cone.

    Args:
        cone: polyhedron with zero right-hand side
        verbose: show progress bar

    Returns:
        ambient dimension minus rank of the implicit equalities

    Raises:
        ValueError: if ``cone`` is not homogeneous

    Examples:
        >>> cone_dimension(Polyhedron([[1, -1], [-1, 1]], [0, 0]))
        1

    """
    implicit = sorted(implicit_equalities(cone, verbose=verbose))
    return cone.dim - rank([cone.A[i] for i in implicit])


def _lifted_rows(setting: "PmvSetting", homogeneous: bool):
    q = setting.q
    ops = setting.ops.matrix
    num_ops = len(ops)
    A = []
    b = []
    for a, rhs in setting.source.rows():
        A.append(a + zeros(num_ops))
        b.append(Fraction(0) if homogeneous else rhs)
    for a, rhs in setting.target.rows():
        A.append(a + tuple(dot(a, op) for op in ops))
        b.append(Fraction(0) if homogeneous else rhs)
    for k in range(num_ops):
        A.append(zeros(q) + tuple(-v for v in unit(num_ops, k)))
        b.append(Fraction(0))
    return A, b


def build_cone(
    setting: "PmvSetting",
    which: str,
    *,
    budget: Fraction | int | str | None = None,
) -> LiftedCone:
    r"""Homogeneous unstable sets of a setting.

    ``"zero"`` returns :math:`(H_S)_{\le 0} \cap (H_T)_{\le 0}`
    over the histogram block only,
    with identical rows removed.
    ``"infinity"`` returns the lifted cone
    :math:`A_S x \le 0, A_T(x + o^T O) \le 0, o \ge 0`.
    ``"budget"`` adds the row :math:`c \cdot o \le B`.

    Args:
        setting: PMV-instability setting
        which: ``"zero"``, ``"infinity"`` or ``"budget"``
        budget: budget :math:`B \ge 0`, required for ``"budget"``

    Returns:
        lifted cone

    Raises:
        ValueError: if ``which`` is unknown
            or the budget is missing or negative

    Examples:
        >>> lc = build_cone(toy, "infinity")
        >>> [[int(v) for v in row] for row in lc.polyhedron.A]
        [[1, -1, 0], [-1, 1, -2], [0, 0, -1]]

    """
    q = setting.q
    if which == ZERO_CONE:
        rows = []
        for a in setting.source.A + setting.target.A:
            if a not in rows:
                rows.append(a)
        return LiftedCone(Polyhedron(rows, zeros(len(rows)), q), q, 0)
    if which not in (INFINITY_CONE, BUDGET_CONE):
        raise ValueError(
            f"Unknown cone '{which}', "
            f"expected one of {[ZERO_CONE, INFINITY_CONE, BUDGET_CONE]}."
        )
    A, b = _lifted_rows(setting, homogeneous=True)
    num_ops = len(setting.ops.matrix)
    if which == INFINITY_CONE:
        return LiftedCone(Polyhedron(A, b, q + num_ops), q, num_ops)
    if budget is None:
        raise ValueError("A budget cone needs a budget.")
    budget = to_fraction(budget)
    if budget < 0:
        raise ValueError(f"Budget must be non-negative, not {budget}.")
    A.append(zeros(q) + tuple(setting.costs))
    b.append(budget)
    return LiftedCone(Polyhedron(A, b, q + num_ops), q, num_ops, budget)


def build_hull(
    setting: "PmvSetting",
    budget: Fraction | int | str | None = None,
) -> LiftedCone:
    r"""Lifted unstable set without size and integrality constraints.

    The set :math:`A_S x \le b_S, A_T(x + o^T O) \le b_T, o \ge 0`,
    with the budget row :math:`c \cdot o \le B` if ``budget`` is given.
    Its characteristic cone is the infinity cone of the setting.

    Args:
        setting: PMV-instability setting
        budget: budget, ``None`` for an unlimited budget

    Returns:
        lifted polyhedron

    Raises:
        ValueError: if budget is negative

    """
    q = setting.q
    A, b = _lifted_rows(setting, homogeneous=False)
    num_ops = len(setting.ops.matrix)
    if budget is not None:
        budget = to_fraction(budget)
        if budget < 0:
            raise ValueError(f"Budget must be non-negative, not {budget}.")
        A.append(zeros(q) + tuple(setting.costs))
        b.append(budget)
    return LiftedCone(Polyhedron(A, b, q + num_ops), q, num_ops, budget)


def _box_program(lc: LiftedCone, objective: Vector) -> LinearProgram:
    q = lc.q
    lower = (Fraction(-1),) * q + (None,) * lc.num_ops
    upper = (Fraction(1),) * q + (None,) * lc.num_ops
    return LinearProgram(
        q + lc.num_ops,
        inequalities=lc.polyhedron.rows(),
        objective=objective + zeros(lc.num_ops),
        lower=lower,
        upper=upper,
    )


def projected_dimension(lc: LiftedCone) -> int:
    r"""Dimension of the projection of a lifted cone onto the histogram block.

    Grows a basis of projected points:
    each direction orthogonal to the points found so far
    is maximized and minimized over the cone
    intersected with the box :math:`-1 \le x \le 1`,
    and any non-zero optimum adds its projected witness.

    Args:
        lc: lifted cone with zero right-hand side

    Returns:
        dimension of the projection

    Raises:
        ValueError: if ``lc`` is not homogeneous

    Examples:
        >>> projected_dimension(build_cone(toy, "infinity"))
        2

    """
    _check_homogeneous(lc.polyhedron)
    q = lc.q
    found = []
    while len(found) < q:
        witness = None
        for direction in orthogonal_complement(found, q):
            for sign in (1, -1):
                objective = tuple(sign * v for v in direction)
                outcome = lp_solve(_box_program(lc, objective))
                if outcome.status == define.OPTIMAL and outcome.value > 0:
                    witness = outcome.witness[:q]
                    break
            if witness is not None:
                break
        if witness is None:
            break
        found.append(witness)
    return len(found)


def points(pi_vertices: Sequence) -> tuple[Vector, ...]:
    r"""Probability vectors of distributions or plain sequences.

    Raises:
        ValueError: if ``pi_vertices`` is empty
            or vectors differ in length

    """
    if not pi_vertices:
        raise ValueError("At least one distribution is required.")
    result = tuple(
        vector(getattr(pi, "probabilities", pi)) for pi in pi_vertices
    )
    if len({len(p) for p in result}) > 1:
        raise ValueError("All distributions need the same number of entries.")
    return result


def _mixture_program(
    lc: LiftedCone,
    vertices: Sequence[Vector],
    *,
    objective: Vector | None = None,
) -> LinearProgram:
    r"""LP over mixture weights and operation counts.

    The histogram block is replaced by
    :math:`x = \sum_j \alpha_j \pi_j` with :math:`\alpha` in the simplex.

    """
    t = len(vertices)
    if len(vertices[0]) != lc.q:
        raise ValueError(
            f"Distributions have {len(vertices[0])} entries, expected {lc.q}."
        )
    rows = []
    for a, b in lc.polyhedron.rows():
        a_x, a_o = a[: lc.q], a[lc.q :]
        rows.append((tuple(dot(a_x, pi) for pi in vertices) + a_o, b))
    simplex = ((Fraction(1),) * t + zeros(lc.num_ops), Fraction(1))
    return LinearProgram(
        t + lc.num_ops,
        inequalities=rows,
        equalities=[simplex],
        objective=objective,
        lower=(Fraction(0),) * t + (None,) * lc.num_ops,
    )


def hull_intersection(
    lc: LiftedCone,
    pi_vertices: Sequence,
) -> Vector | None:
    r"""Mixture weights of a distribution in the convex hull inside a cone.

    Args:
        lc: lifted cone
        pi_vertices: vertices of the distribution hull

    Returns:
        mixture weights :math:`\alpha`
        or ``None`` if hull and projected cone do not meet

    Raises:
        ValueError: if ``pi_vertices`` is empty

    Examples:
        >>> half = [Fraction(1, 2), Fraction(1, 2)]
        >>> hull_intersection(build_cone(toy, "zero"), [half])
        (Fraction(1, 1),)

    """
    vertices = points(pi_vertices)
    outcome = lp_solve(_mixture_program(lc, vertices))
    if outcome.status == define.INFEASIBLE:
        return None
    return outcome.witness[: len(vertices)]


def mixture(alpha: Sequence, pi_vertices: Sequence) -> Vector:
    r"""Convex combination of distributions."""
    vertices = points(pi_vertices)
    q = len(vertices[0])
    return tuple(
        sum((a * pi[i] for a, pi in zip(alpha, vertices)), Fraction(0))
        for i in range(q)
    )


def _touch(
    setting: "PmvSetting",
    vertices: Sequence[Vector],
) -> BudgetThreshold:
    lc = build_cone(setting, INFINITY_CONE)
    t = len(vertices)
    objective = zeros(t) + tuple(-c for c in setting.costs)
    outcome = lp_solve(_mixture_program(lc, vertices, objective=objective))
    if outcome.status != define.OPTIMAL:
        return BudgetThreshold(None)
    alpha = outcome.witness[:t]
    ops = outcome.witness[t:]
    return BudgetThreshold(-outcome.value, (mixture(alpha, vertices), ops))


def min_budget(
    setting: "PmvSetting",
    pi_vertices: Sequence,
    mode: str = define.TOUCH,
    *,
    verbose: bool = False,
) -> BudgetThreshold:
    r"""Minimum budget whose cone touches or covers the distribution hull.

    ``"touch"`` minimizes :math:`c \cdot o`
    over points of the hull
    that the operations move into the target cone.
    ``"cover"`` solves the same problem for every vertex
    and returns the largest value.

    Args:
        setting: PMV-instability setting
        pi_vertices: vertices of the distribution hull
        mode: ``"touch"`` or ``"cover"``
        verbose: show progress bar

    Returns:
        threshold, infinite if no budget suffices

    Raises:
        ValueError: if ``pi_vertices`` is empty or ``mode`` is unknown

    Examples:
        >>> min_budget(toy, [[Fraction(2, 5), Fraction(3, 5)]]).value
        Fraction(1, 10)

    """
    vertices = points(pi_vertices)
    if mode == define.TOUCH:
        return _touch(setting, vertices)
    if mode != define.COVER:
        raise ValueError(
            f"Unknown mode '{mode}', expected one of {[define.TOUCH, define.COVER]}."
        )
    thresholds = utils.run_tasks(
        _touch,
        [([setting, [pi]], {}) for pi in vertices],
        verbose=verbose,
        task_description="Cover thresholds",
    )
    worst = None
    for threshold in thresholds:
        if threshold.is_infinite:
            return BudgetThreshold(None)
        if worst is None or threshold.value > worst.value:
            worst = threshold
    return worst
