from collections.abc import Iterable
from collections.abc import Sequence
import dataclasses
from fractions import Fraction
import math

from pmvforge.core import define
from pmvforge.core.arith import Vector
from pmvforge.core.arith import dot
from pmvforge.core.arith import to_fraction
from pmvforge.core.arith import vector
from pmvforge.core.config import config


class SearchExhaustedError(RuntimeError):
    r"""Search budget exhausted before an answer was proven.

    Raised instead of returning a possibly wrong answer.
    ``lower`` and ``upper`` hold partial bounds
    when the search can provide them.

    """

    def __init__(
        self,
        message: str,
        *,
        lower: object = None,
        upper: object = None,
    ):
        super().__init__(message)
        self.lower = lower
        self.upper = upper


Row = tuple[Vector, Fraction]


@dataclasses.dataclass(frozen=True)
class LinearProgram:
    r"""Linear program over exact rationals.

    Inequality rows ``(a, b)`` mean :math:`a \cdot x \le b`,
    equality rows mean :math:`a \cdot x = b`.
    A missing objective turns the program into a feasibility problem.
    Bounds are tuples with one entry per variable,
    ``None`` marks a missing bound.

    Args:
        num_vars: number of variables
        inequalities: inequality rows
        equalities: equality rows
        objective: coefficients of the objective to maximize
        lower: lower bounds, by default all variables are free
        upper: upper bounds

    Raises:
        ValueError: if a row or the objective does not have ``num_vars`` entries,
            or a lower bound exceeds its upper bound

    Examples:
        >>> prog = LinearProgram(1, inequalities=[([1], 1)], objective=[1], lower=[0])
        >>> prog.inequalities
        (((Fraction(1, 1),), Fraction(1, 1)),)

    """

    num_vars: int
    inequalities: Sequence[Row] = ()
    equalities: Sequence[Row] = ()
    objective: Vector | None = None
    lower: Sequence[Fraction | None] | None = None
    upper: Sequence[Fraction | None] | None = None

    def __post_init__(self):
        if self.num_vars < 0:
            raise ValueError(
                f"Number of variables must be non-negative, not {self.num_vars}."
            )
        object.__setattr__(self, "inequalities", self._rows(self.inequalities))
        object.__setattr__(self, "equalities", self._rows(self.equalities))
        if self.objective is not None:
            objective = vector(self.objective)
            self._check_length(objective, "Objective")
            object.__setattr__(self, "objective", objective)
        lower = self._bounds(self.lower, "Lower bounds")
        upper = self._bounds(self.upper, "Upper bounds")
        for j, (lo, up) in enumerate(zip(lower, upper)):
            if lo is not None and up is not None and lo > up:
                raise ValueError(
                    f"Lower bound {lo} of variable {j} exceeds its upper bound {up}."
                )
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    def _check_length(self, row: Vector, what: str):
        if len(row) != self.num_vars:
            raise ValueError(
                f"{what} has {len(row)} entries, expected {self.num_vars}."
            )

    def _rows(self, rows: Iterable) -> tuple[Row, ...]:
        result = []
        for a, b in rows:
            a = vector(a)
            self._check_length(a, "Constraint row")
            result.append((a, to_fraction(b)))
        return tuple(result)

    def _bounds(self, bounds, what: str) -> tuple[Fraction | None, ...]:
        if bounds is None:
            return (None,) * self.num_vars
        bounds = tuple(None if v is None else to_fraction(v) for v in bounds)
        if len(bounds) != self.num_vars:
            raise ValueError(
                f"{what} have {len(bounds)} entries, expected {self.num_vars}."
            )
        return bounds

    def is_feasible(self, x: Sequence) -> bool:
        r"""Check exactly whether ``x`` satisfies every constraint."""
        if len(x) != self.num_vars:
            return False
        for lo, up, value in zip(self.lower, self.upper, x):
            if lo is not None and value < lo:
                return False
            if up is not None and value > up:
                return False
        if any(dot(a, x) > b for a, b in self.inequalities):
            return False
        return all(dot(a, x) == b for a, b in self.equalities)

    def with_bounds(
        self,
        lower: Sequence[Fraction | None],
        upper: Sequence[Fraction | None],
    ) -> "LinearProgram":
        r"""Copy of the program with replaced bounds."""
        return dataclasses.replace(self, lower=tuple(lower), upper=tuple(upper))


@dataclasses.dataclass(frozen=True)
class LpOutcome:
    r"""Result of :func:`lp_solve`.

    ``witness`` is an optimal basic feasible solution
    if ``status`` is ``"optimal"``
    and a feasible ray along which the objective grows
    if ``status`` is ``"unbounded"``.
    Feasibility problems report value ``0``.

    """

    status: str
    value: Fraction | None = None
    witness: Vector | None = None


def _substitution(prog: LinearProgram):
    r"""Express every variable by non-negative columns.

    Returns per variable an offset and ``(column, coefficient)`` pairs,
    the number of columns
    and upper bound rows ``(column, bound)``.

    """
    mapping = []
    bound_rows = []
    num_cols = 0
    for lo, up in zip(prog.lower, prog.upper):
        if lo is not None:
            mapping.append((lo, ((num_cols, 1),)))
            if up is not None:
                bound_rows.append((num_cols, up - lo))
            num_cols += 1
        elif up is not None:
            mapping.append((up, ((num_cols, -1),)))
            num_cols += 1
        else:
            mapping.append((Fraction(0), ((num_cols, 1), (num_cols + 1, -1))))
            num_cols += 2
    return mapping, num_cols, bound_rows


def _transform(a: Vector, b: Fraction, mapping, num_cols: int):
    coeffs = [Fraction(0)] * num_cols
    shift = Fraction(0)
    for a_j, (offset, columns) in zip(a, mapping):
        if not a_j:
            continue
        shift += a_j * offset
        for col, coef in columns:
            coeffs[col] += a_j * coef
    return coeffs, b - shift


def _pivot(
    tableau: list[list[Fraction]],
    reduced: list[Fraction],
    basis: list[int],
    row: int,
    col: int,
):
    pivot = tableau[row][col]
    pivot_row = [v / pivot for v in tableau[row]]
    tableau[row] = pivot_row
    for i, other in enumerate(tableau):
        factor = other[col]
        if i != row and factor:
            tableau[i] = [a - factor * b if b else a for a, b in zip(other, pivot_row)]
    factor = reduced[col]
    if factor:
        reduced[:] = [a - factor * b if b else a for a, b in zip(reduced, pivot_row)]
    basis[row] = col


def _reduced_costs(
    tableau: list[list[Fraction]],
    basis: list[int],
    cost: list[Fraction],
) -> list[Fraction]:
    reduced = list(cost) + [Fraction(0)]
    for row, col in zip(tableau, basis):
        factor = cost[col]
        if factor:
            reduced = [a - factor * b for a, b in zip(reduced, row)]
    return reduced


def _simplex(
    tableau: list[list[Fraction]],
    reduced: list[Fraction],
    basis: list[int],
    num_cols: int,
) -> int | None:
    r"""Maximize with Bland's rule.

    Returns ``None`` at the optimum,
    otherwise the entering column of an unbounded ray.

    """
    while True:
        enter = next((j for j in range(num_cols) if reduced[j] > 0), None)
        if enter is None:
            return None
        leave = None
        best = None
        for i, row in enumerate(tableau):
            if row[enter] > 0:
                ratio = row[-1] / row[enter]
                key = (ratio, basis[i])
                if best is None or key < best:
                    best = key
                    leave = i
        if leave is None:
            return enter
        _pivot(tableau, reduced, basis, leave, enter)


def lp_solve(prog: LinearProgram) -> LpOutcome:
    r"""Solve linear program exactly.

    Runs a two-phase tableau simplex over :class:`fractions.Fraction`
    with Bland's anti-cycling rule.
    Bounded variables are shifted,
    free variables split into positive and negative part.

    Args:
        prog: linear program

    Returns:
        outcome with status ``"optimal"``, ``"unbounded"`` or ``"infeasible"``

    Examples:
        >>> prog = LinearProgram(1, inequalities=[([1], 1)], objective=[1], lower=[0])
        >>> outcome = lp_solve(prog)
        >>> outcome.status, outcome.value
        ('optimal', Fraction(1, 1))
        >>> lp_solve(LinearProgram(1, objective=[1], lower=[0])).status
        'unbounded'

    """
    mapping, num_cols, bound_rows = _substitution(prog)

    rows = []
    for a, b in prog.inequalities:
        rows.append((*_transform(a, b, mapping, num_cols), False))
    for col, bound in bound_rows:
        coeffs = [Fraction(0)] * num_cols
        coeffs[col] = Fraction(1)
        rows.append((coeffs, bound, False))
    for a, b in prog.equalities:
        rows.append((*_transform(a, b, mapping, num_cols), True))

    num_slacks = sum(not equality for _, _, equality in rows)
    num_real = num_cols + num_slacks
    tableau = []
    basis = []
    artificial_rows = []
    slack = num_cols
    for coeffs, rhs, equality in rows:
        row = coeffs + [Fraction(0)] * num_slacks
        if not equality:
            row[slack] = Fraction(1)
        sign = -1 if rhs < 0 else 1
        if sign < 0:
            row = [-v for v in row]
            rhs = -rhs
        if not equality and sign > 0:
            basis.append(slack)
        else:
            basis.append(None)
            artificial_rows.append(len(tableau))
        if not equality:
            slack += 1
        tableau.append(row + [rhs])

    num_artificial = len(artificial_rows)
    if num_artificial:
        for k, i in enumerate(artificial_rows):
            basis[i] = num_real + k
        for i, row in enumerate(tableau):
            extra = [Fraction(0)] * num_artificial
            if i in artificial_rows:
                extra[artificial_rows.index(i)] = Fraction(1)
            tableau[i] = row[:-1] + extra + row[-1:]
        cost = [Fraction(0)] * num_real + [Fraction(-1)] * num_artificial
        reduced = _reduced_costs(tableau, basis, cost)
        _simplex(tableau, reduced, basis, num_real + num_artificial)
        if reduced[-1] != 0:
            return LpOutcome(define.INFEASIBLE)
        # drive remaining artificial variables out of the basis
        redundant = []
        for i in range(len(tableau)):
            if basis[i] < num_real:
                continue
            col = next((j for j in range(num_real) if tableau[i][j]), None)
            if col is None:
                redundant.append(i)
            else:
                _pivot(tableau, reduced, basis, i, col)
        tableau = [
            row[:num_real] + row[-1:]
            for i, row in enumerate(tableau)
            if i not in redundant
        ]
        basis = [col for i, col in enumerate(basis) if i not in redundant]

    def to_original(y: list[Fraction], with_offset: bool = True) -> Vector:
        x = []
        for offset, columns in mapping:
            value = offset if with_offset else Fraction(0)
            for col, coef in columns:
                value += coef * y[col]
            x.append(value)
        return tuple(x)

    def basic_solution() -> list[Fraction]:
        y = [Fraction(0)] * num_real
        for row, col in zip(tableau, basis):
            y[col] = row[-1]
        return y

    if prog.objective is None:
        return LpOutcome(define.OPTIMAL, Fraction(0), to_original(basic_solution()))

    objective, _ = _transform(prog.objective, Fraction(0), mapping, num_cols)
    cost = objective + [Fraction(0)] * num_slacks
    reduced = _reduced_costs(tableau, basis, cost)
    enter = _simplex(tableau, reduced, basis, num_real)
    if enter is not None:
        direction = [Fraction(0)] * num_real
        direction[enter] = Fraction(1)
        for row, col in zip(tableau, basis):
            direction[col] = -row[enter]
        return LpOutcome(
            define.UNBOUNDED,
            witness=to_original(direction, with_offset=False),
        )
    x = to_original(basic_solution())
    return LpOutcome(define.OPTIMAL, dot(prog.objective, x), x)


def _fractional_part(value: Fraction) -> Fraction:
    return value - math.floor(value)


def _round_to_integers(
    prog: LinearProgram,
    x: Vector,
    integer_vars: Sequence[int],
) -> Vector | None:
    r"""Fix integer variables to rounded values and re-solve."""
    lower = list(prog.lower)
    upper = list(prog.upper)
    for j in integer_vars:
        value = math.floor(x[j] + Fraction(1, 2))
        value = max(lower[j], min(upper[j], value))
        lower[j] = upper[j] = Fraction(value)
    outcome = lp_solve(prog.with_bounds(lower, upper))
    if outcome.status == define.INFEASIBLE:
        return None
    return outcome.witness


def ilp_feasible(
    prog: LinearProgram,
    integer_vars: Iterable[int],
    *,
    node_limit: int | None = None,
) -> Vector | None:
    r"""Find a point with integer entries at ``integer_vars``.

    Depth-first branch-and-bound on the LP relaxation.
    Each node branches on the integer variable
    with the largest fractional part,
    exploring the rounded down branch first.
    The root additionally tries to round its relaxation.

    Args:
        prog: linear program, its objective is ignored
        integer_vars: indices of integer variables
        node_limit: maximum number of nodes,
            by default :attr:`config.NODE_LIMIT`

    Returns:
        witness or ``None`` if no integer point exists

    Raises:
        ValueError: if an integer variable lacks a lower or upper bound
        SearchExhaustedError: if the node limit is reached

    Examples:
        >>> prog = LinearProgram(1, equalities=[([2], 1)], lower=[0], upper=[1])
        >>> ilp_feasible(prog, [0]) is None
        True

    """
    if node_limit is None:
        node_limit = config.NODE_LIMIT
    integer_vars = sorted(set(integer_vars))
    for j in integer_vars:
        if not 0 <= j < prog.num_vars:
            raise ValueError(f"Integer variable {j} is out of range.")
        if prog.lower[j] is None or prog.upper[j] is None:
            raise ValueError(
                f"Integer variable {j} needs a finite lower and upper bound."
            )

    lower = list(prog.lower)
    upper = list(prog.upper)
    for j in integer_vars:
        lower[j] = Fraction(math.ceil(lower[j]))
        upper[j] = Fraction(math.floor(upper[j]))
        if lower[j] > upper[j]:
            return None
    prog = dataclasses.replace(prog, objective=None, lower=lower, upper=upper)

    stack = [(tuple(lower), tuple(upper))]
    nodes = 0
    while stack:
        nodes += 1
        if nodes > node_limit:
            raise SearchExhaustedError(
                f"Branch-and-bound stopped after {node_limit} nodes."
            )
        lower, upper = stack.pop()
        node = prog.with_bounds(lower, upper)
        outcome = lp_solve(node)
        if outcome.status == define.INFEASIBLE:
            continue
        x = outcome.witness
        fractional = [j for j in integer_vars if x[j].denominator != 1]
        if not fractional:
            return x
        if nodes == 1:
            rounded = _round_to_integers(node, x, integer_vars)
            if rounded is not None:
                return rounded
        j = max(fractional, key=lambda k: (_fractional_part(x[k]), -k))
        down_upper = list(upper)
        down_upper[j] = Fraction(math.floor(x[j]))
        up_lower = list(lower)
        up_lower[j] = Fraction(math.ceil(x[j]))
        stack.append((tuple(up_lower), upper))
        stack.append((lower, tuple(down_upper)))
    return None
