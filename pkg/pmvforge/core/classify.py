from collections.abc import Sequence
import dataclasses
from fractions import Fraction
import functools
import itertools
import math
import warnings

from pmvforge.core import define
from pmvforge.core import utils
from pmvforge.core.arith import Vector
from pmvforge.core.arith import dot
from pmvforge.core.arith import format_fraction
from pmvforge.core.arith import negate
from pmvforge.core.arith import to_fraction
from pmvforge.core.arith import unit
from pmvforge.core.arith import zeros
from pmvforge.core.config import config
from pmvforge.core.lp import LinearProgram
from pmvforge.core.lp import SearchExhaustedError
from pmvforge.core.lp import ilp_feasible
from pmvforge.core.lp import lp_solve
from pmvforge.core.polyhedra import INFINITY_CONE
from pmvforge.core.polyhedra import ZERO_CONE
from pmvforge.core.polyhedra import BudgetThreshold
from pmvforge.core.polyhedra import Polyhedron
from pmvforge.core.polyhedra import build_cone
from pmvforge.core.polyhedra import cone_dimension
from pmvforge.core.polyhedra import hull_intersection
from pmvforge.core.polyhedra import min_budget
from pmvforge.core.polyhedra import points
from pmvforge.core.polyhedra import projected_dimension
from pmvforge.core.settings import PmvSetting
from pmvforge.core.settings import SettingFamily


@dataclasses.dataclass(frozen=True)
class ConditionReport:
    r"""Conditions deciding the likelihood case of a setting.

    ``c1``: no histogram of size ``n`` is unstable within the budget,
    ``None`` if the integer search was exhausted.
    ``c2``: the distribution hull misses the projected infinity cone.
    ``c3``: the distribution hull misses the zero cone.
    ``c4``: some vertex lies outside the projected infinity cone.
    ``c5``: some vertex lies outside the zero cone.

    Raises:
        AssertionError: if ``c2`` holds without ``c3``
            or ``c4`` without ``c5``

    """

    c1: bool | None
    c2: bool
    c3: bool
    c4: bool
    c5: bool
    witnesses: dict = dataclasses.field(default_factory=dict, compare=False)

    def __post_init__(self):
        assert not self.c2 or self.c3, "hull misses infinity but not zero cone"
        assert not self.c4 or self.c5, "vertex outside infinity but in zero cone"

    def to_dict(self) -> dict:
        r"""Serialize conditions."""
        return {f"C{i}": getattr(self, f"c{i}") for i in range(1, 6)}


def _vertices(pi_vertices: Sequence) -> tuple[Vector, ...]:
    r"""Validated distinct vertices."""
    vertices = points(pi_vertices)
    for pi in vertices:
        if any(p < 0 for p in pi) or sum(pi) != 1:
            raise ValueError(f"{[str(p) for p in pi]} is not a distribution.")
    unique = tuple(dict.fromkeys(vertices))
    if len(unique) < len(vertices):
        warnings.warn("Duplicate distributions are ignored.")
    return unique


def _check_size(n: int, budget: Fraction | int | str) -> Fraction:
    if n < 1:
        raise ValueError(f"Number of voters must be positive, not {n}.")
    budget = to_fraction(budget)
    if budget < 0:
        raise ValueError(f"Budget must be non-negative, not {budget}.")
    return budget


def _unstable_histogram(
    setting: PmvSetting,
    n: int,
    budget: Fraction,
    node_limit: int | None,
) -> tuple[Vector, Vector] | None:
    r"""Integer histogram of size ``n`` and operations within the budget."""
    q = setting.q
    ops = setting.ops.matrix
    num_ops = len(ops)
    rows = [(a + zeros(num_ops), b) for a, b in setting.source.rows()]
    rows += [
        (a + tuple(dot(a, op) for op in ops), b) for a, b in setting.target.rows()
    ]
    rows.append((zeros(q) + tuple(setting.costs), budget))
    rows += [
        (negate(unit(q, r)) + coef, Fraction(0)) for r, coef in setting.ops.outflow()
    ]
    prog = LinearProgram(
        q + num_ops,
        inequalities=rows,
        equalities=[((Fraction(1),) * q + zeros(num_ops), n)],
        lower=(0,) * (q + num_ops),
        upper=(n,) * q + tuple(math.floor(budget / c) for c in setting.costs),
    )
    witness = ilp_feasible(prog, range(q + num_ops), node_limit=node_limit)
    if witness is None:
        return None
    return witness[:q], witness[q:]


def check_conditions(
    setting: PmvSetting,
    pi_vertices: Sequence,
    n: int,
    budget: Fraction | int | str,
    *,
    node_limit: int | None = None,
) -> ConditionReport:
    r"""Evaluate the conditions of a setting.

    Args:
        setting: PMV-instability setting
        pi_vertices: vertices of the distribution hull
        n: number of voters
        budget: budget
        node_limit: branch-and-bound nodes of the integer search,
            by default :attr:`config.NODE_LIMIT`

    Returns:
        condition report,
        ``c1`` is ``None`` if the integer search was exhausted

    Raises:
        ValueError: if ``n < 1``, the budget is negative
            or a vertex is not a distribution

    Examples:
        >>> half = [Fraction(1, 2), Fraction(1, 2)]
        >>> report = check_conditions(toy, [half], 10, 1)
        >>> report.c1, report.c2, report.c3
        (False, False, False)

    """
    budget = _check_size(n, budget)
    vertices = _vertices(pi_vertices)
    witnesses = {}
    try:
        found = _unstable_histogram(setting, n, budget, node_limit)
        c1 = found is None
        if found is not None:
            witnesses["C1"] = found
    except SearchExhaustedError:
        c1 = None

    infinity = build_cone(setting, INFINITY_CONE)
    zero = build_cone(setting, ZERO_CONE)
    for key, lc in (("C2", infinity), ("C3", zero)):
        alpha = hull_intersection(lc, vertices)
        if alpha is not None:
            witnesses[key] = alpha
    c2 = "C2" not in witnesses
    c3 = "C3" not in witnesses

    outside_infinity = [
        j
        for j, pi in enumerate(vertices)
        if hull_intersection(infinity, [pi]) is None
    ]
    outside_zero = [
        j for j, pi in enumerate(vertices) if not zero.polyhedron.contains(pi)
    ]
    if outside_infinity:
        witnesses["C4"] = outside_infinity[0]
    if outside_zero:
        witnesses["C5"] = outside_zero[0]
    return ConditionReport(
        c1,
        c2,
        c3,
        bool(outside_infinity),
        bool(outside_zero),
        witnesses,
    )


_NEG_INF = "-inf"
_EXP = "exp"
_POLY = "poly"
_KIND_ORDER = {_NEG_INF: 0, _EXP: 1, _POLY: 2}


@functools.total_ordering
@dataclasses.dataclass(frozen=True, eq=False)
class Weight:
    r"""Weight of a setting at a distribution.

    Weights are :math:`-\infty` for settings without unstable histograms,
    :math:`-2n / \log n` for distributions outside the zero cone,
    and :math:`d_0 + d_\Delta \min\{2 \log(B + 1) / \log n, 1\}` otherwise.
    They are ordered
    :math:`-\infty` < exponential < polynomial,
    polynomial weights are compared exactly.

    Args:
        kind: ``"-inf"``, ``"exp"`` or ``"poly"``
        d0: dimension of the zero cone
        d_delta: dimension gap between infinity and zero cone
        n: number of voters
        budget: budget

    Examples:
        >>> low = Weight.polynomial(4, 2, n=10_000, budget=1)
        >>> high = Weight.polynomial(5, 1, n=10_000, budget=1)
        >>> low < high, Weight.exponential() < low
        (True, True)

    """

    kind: str
    d0: int = 0
    d_delta: int = 0
    n: int = 1
    budget: Fraction = Fraction(0)

    @classmethod
    def negative_infinity(cls) -> "Weight":
        r"""Weight of a setting without unstable histograms."""
        return cls(_NEG_INF)

    @classmethod
    def exponential(cls) -> "Weight":
        r"""Weight of a distribution outside the zero cone."""
        return cls(_EXP)

    @classmethod
    def polynomial(
        cls,
        d0: int,
        d_delta: int,
        *,
        n: int,
        budget: Fraction | int | str,
    ) -> "Weight":
        r"""Weight of a distribution inside the zero cone."""
        return cls(_POLY, d0, d_delta, n, to_fraction(budget))

    def _compare(self, other: "Weight") -> int:
        if self.kind != other.kind:
            return _KIND_ORDER[self.kind] - _KIND_ORDER[other.kind]
        if self.kind != _POLY:
            return 0
        diff = self.d0 - other.d0
        k = other.d_delta - self.d_delta
        if k == 0 or self.budget == 0:
            return diff
        if (self.budget + 1) ** 2 >= self.n:
            return diff - k
        # compare d0 + d_delta * 2 log(B + 1) / log n without logarithms
        lhs = Fraction(self.n) ** diff
        rhs = (self.budget + 1) ** (2 * k)
        return (lhs > rhs) - (lhs < rhs)

    def __eq__(self, other) -> bool:  # noqa: D105
        return isinstance(other, Weight) and self._compare(other) == 0

    def __lt__(self, other: "Weight") -> bool:  # noqa: D105
        return self._compare(other) < 0

    __hash__ = None

    @property
    def budget_factor(self) -> float:
        r"""Value of :math:`\min\{2 \log(B + 1) / \log n, 1\}`."""
        if self.budget == 0:
            return 0.0
        if (self.budget + 1) ** 2 >= self.n:
            return 1.0
        return 2 * math.log(self.budget + 1) / math.log(self.n)

    def exponent(self, q: int) -> float | None:
        r"""Exponent :math:`q - w` of :math:`1 / \sqrt{n}`.

        ``None`` unless the weight is polynomial.

        Examples:
            >>> round(Weight.polynomial(5, 1, n=10_000, budget=1).exponent(6), 4)
            0.8495

        """
        if self.kind != _POLY:
            return None
        return q - self.d0 - self.d_delta * self.budget_factor

    def __str__(self) -> str:  # noqa: D105
        if self.kind == _NEG_INF:
            return "-inf"
        if self.kind == _EXP:
            return "-2n/log(n)"
        return f"{self.d0} + {self.d_delta}*min{{2log(B+1)/log(n), 1}}"


@dataclasses.dataclass(frozen=True)
class ActivationGraph:
    r"""Weights of the settings of a family.

    Args:
        n: number of voters
        budget: budget
        weights: weight of every setting
            at distributions inside its zero cone,
            :math:`-\infty` for inactive settings
        active: settings with unstable histograms
        meets_zero_cone: settings whose zero cone meets the distribution hull

    """

    n: int
    budget: Fraction
    weights: tuple[Weight, ...]
    active: tuple[bool, ...]
    meets_zero_cone: tuple[bool, ...]

    def sup_weight(self, index: int) -> Weight:
        r"""Largest weight of a setting over the distribution hull."""
        if not self.active[index]:
            return Weight.negative_infinity()
        if self.meets_zero_cone[index]:
            return self.weights[index]
        return Weight.exponential()

    @property
    def w_max(self) -> Weight:
        r"""Largest weight over settings and distributions."""
        return max(self.sup_weight(i) for i in range(len(self.weights)))

    def pattern_weight(self, members: frozenset[int]) -> Weight:
        r"""Weight of a distribution inside exactly the zero cones ``members``.

        Only active settings are considered.

        """
        result = Weight.negative_infinity()
        for i, active in enumerate(self.active):
            if not active:
                continue
            weight = self.weights[i] if i in members else Weight.exponential()
            result = max(result, weight)
        return result


@dataclasses.dataclass(frozen=True)
class ClassificationResult:
    r"""Likelihood case of semi-random instability.

    Args:
        case: one of ``"zero"``, ``"exponential"``,
            ``"pt-sqrt-n"``, ``"pt-linear-n"``,
            ``"poly-exponent"``, ``"constant"``
            and ``"undetermined"``
        mode: ``"sup"`` or ``"inf"``
        symbolic_bound: rendered likelihood bound
        d0: dimension of the zero cone
        d_delta: dimension gap between infinity and zero cone
        d_inf: dimension of the projected infinity cone
        threshold: budget threshold of the linear phase transition
        subcase: ``"below-c2"``, ``"above-c3"`` or ``"knife"``
        exponent: exponent of :math:`1 / \sqrt{n}`
        weight: largest or smallest weight of a family
        bounds: partial bounds of an exhausted weight search
        margin: margin of strict cone exclusion
        conditions: condition report of a single setting

    """

    case: str
    mode: str
    symbolic_bound: str
    d0: int | None = None
    d_delta: int | None = None
    d_inf: int | None = None
    threshold: BudgetThreshold | None = None
    subcase: str | None = None
    exponent: float | int | None = None
    weight: Weight | None = None
    bounds: tuple[Weight, Weight] | None = None
    margin: Fraction | None = None
    conditions: ConditionReport | None = None

    @property
    def is_undetermined(self) -> bool:
        r"""``True`` if no case could be decided."""
        return self.case == define.UNDETERMINED or self.subcase == define.KNIFE

    def to_dict(self) -> dict:
        r"""Serialize result with rationals as strings."""
        data = {
            "case": self.case,
            "mode": self.mode,
            "symbolic_bound": self.symbolic_bound,
            "d0": self.d0,
            "d_delta": self.d_delta,
            "d_inf": self.d_inf,
            "threshold": None if self.threshold is None else str(self.threshold),
            "subcase": self.subcase,
            "exponent": self.exponent,
            "weight": None if self.weight is None else str(self.weight),
            "bounds": None if self.bounds is None else [str(w) for w in self.bounds],
            "margin": None if self.margin is None else format_fraction(self.margin),
            "conditions": (
                None if self.conditions is None else self.conditions.to_dict()
            ),
        }
        return {key: value for key, value in data.items() if value is not None}


_ZERO_BOUND = "0"
_EXP_BOUND = "exp(-Θ(n))"
_CONSTANT_BOUND = "Θ(1)"
_UNDETERMINED_BOUND = "undetermined"


def _poly_bound(exponent: float | int) -> str:
    if isinstance(exponent, float):
        exponent = f"{exponent:.4f}"
    return f"Θ((1/√n)^{exponent})"


def _check_mode(mode: str):
    if mode not in (define.SUP, define.INF):
        raise ValueError(
            f"Unknown mode '{mode}', expected one of {[define.SUP, define.INF]}."
        )


def classify_single(
    setting: PmvSetting,
    pi_vertices: Sequence,
    n: int,
    budget: Fraction | int | str,
    mode: str = define.SUP,
    *,
    knife_band: Fraction | int | str | None = None,
    node_limit: int | None = None,
    verbose: bool = False,
) -> ClassificationResult:
    r"""Classify the semi-random likelihood of a single setting.

    ``"sup"`` decides with conditions C1, C2 and C3,
    ``"inf"`` with C1, C4 and C5.
    The linear phase transition compares the budget
    with the touch (``"sup"``) or cover (``"inf"``) threshold
    times ``n``.
    Budgets within ``knife_band * n`` of it,
    edges included, are not decided.

    Args:
        setting: PMV-instability setting
        pi_vertices: vertices of the distribution hull
        n: number of voters
        budget: budget
        mode: ``"sup"`` or ``"inf"``
        knife_band: relative width of the undecided band,
            by default :attr:`config.KNIFE_BAND`
        node_limit: branch-and-bound nodes of the integer search
        verbose: show progress bar

    Returns:
        classification result

    Raises:
        ValueError: if ``mode`` is unknown,
            ``n < 1``, the budget is negative
            or a vertex is not a distribution

    Examples:
        >>> pi = [Fraction(2, 5), Fraction(3, 5)]
        >>> result = classify_single(toy, [pi], 1000, 250)
        >>> result.case, result.subcase, result.exponent
        ('pt-linear-n', 'above-c3', 0)

    """
    _check_mode(mode)
    budget = _check_size(n, budget)
    band = to_fraction(config.KNIFE_BAND if knife_band is None else knife_band)
    report = check_conditions(setting, pi_vertices, n, budget, node_limit=node_limit)
    q = setting.q
    if report.c1 is None:
        return ClassificationResult(
            define.UNDETERMINED, mode, _UNDETERMINED_BOUND, conditions=report
        )
    if report.c1:
        return ClassificationResult(define.ZERO, mode, _ZERO_BOUND, conditions=report)
    exponential = report.c2 if mode == define.SUP else report.c4
    if exponential:
        return ClassificationResult(
            define.EXPONENTIAL, mode, _EXP_BOUND, conditions=report
        )
    zero = build_cone(setting, ZERO_CONE)
    infinity = build_cone(setting, INFINITY_CONE)
    d_inf = projected_dimension(infinity)
    sqrt_case = not report.c3 if mode == define.SUP else not report.c5
    if sqrt_case:
        d0 = cone_dimension(zero.polyhedron, verbose=verbose)
        d_delta = d_inf - d0
        return ClassificationResult(
            define.PT_SQRT_N,
            mode,
            f"Θ(min{{B+1,√n}}^{d_delta}/(√n)^{q - d0})",
            d0=d0,
            d_delta=d_delta,
            d_inf=d_inf,
            conditions=report,
        )

    threshold_mode = define.TOUCH if mode == define.SUP else define.COVER
    threshold = min_budget(setting, pi_vertices, threshold_mode, verbose=verbose)
    t = threshold.value
    if budget < (t - band) * n:
        subcase, exponent, bound = define.BELOW_C2, None, _EXP_BOUND
    elif budget > (t + band) * n:
        subcase, exponent = define.ABOVE_C3, q - d_inf
        bound = _poly_bound(exponent)
    else:
        warnings.warn(
            f"Budget {budget} is within {band}*n of the threshold {t}*n, "
            "the case is not decided."
        )
        subcase, exponent, bound = define.KNIFE, None, _UNDETERMINED_BOUND
    return ClassificationResult(
        define.PT_LINEAR_N,
        mode,
        bound,
        d_inf=d_inf,
        threshold=threshold,
        subcase=subcase,
        exponent=exponent,
        conditions=report,
    )


@dataclasses.dataclass(frozen=True)
class _SettingSummary:
    conditions: ConditionReport
    weight: Weight
    touch: BudgetThreshold | None


def _summarize(
    setting: PmvSetting,
    vertices: tuple[Vector, ...],
    n: int,
    budget: Fraction,
    node_limit: int | None,
) -> _SettingSummary:
    report = check_conditions(setting, vertices, n, budget, node_limit=node_limit)
    if report.c1 is not False:
        return _SettingSummary(report, Weight.negative_infinity(), None)
    zero = build_cone(setting, ZERO_CONE)
    d0 = cone_dimension(zero.polyhedron)
    d_inf = projected_dimension(build_cone(setting, INFINITY_CONE))
    weight = Weight.polynomial(d0, d_inf - d0, n=n, budget=budget)
    touch = min_budget(setting, vertices, define.TOUCH)
    return _SettingSummary(report, weight, touch)


def _pattern_program(
    vertices: tuple[Vector, ...],
    rows: Sequence[tuple[Vector, Fraction]],
) -> LinearProgram:
    r"""Feasibility of mixture weights with rows over the mixture."""
    t = len(vertices)
    return LinearProgram(
        t,
        inequalities=[(tuple(dot(a, pi) for pi in vertices), b) for a, b in rows],
        equalities=[((Fraction(1),) * t, 1)],
        lower=(0,) * t,
    )


class _PatternSearch:
    r"""Realizability of zero cone membership patterns within an LP budget."""

    def __init__(
        self,
        vertices: tuple[Vector, ...],
        cones: Sequence[Polyhedron],
        margin: Fraction,
        limit: int,
    ):
        self.vertices = vertices
        self.cones = cones
        self.margin = margin
        self.limit = limit
        self.solved = 0

    def feasible(self, rows: Sequence[tuple[Vector, Fraction]]) -> bool:
        if self.solved >= self.limit:
            raise SearchExhaustedError(
                f"Pattern search stopped after {self.limit} linear programs."
            )
        self.solved += 1
        outcome = lp_solve(_pattern_program(self.vertices, rows))
        return outcome.status != define.INFEASIBLE

    def realizable(self, members: frozenset[int], excluded: Sequence[int]) -> bool:
        inside = [
            (a, Fraction(0)) for i in sorted(members) for a in self.cones[i].A
        ]
        if not self.feasible(inside):
            return False
        choices = []
        for i in excluded:
            candidates = []
            for a in self.cones[i].A:
                row = (tuple(-v for v in a), -self.margin)
                if row not in candidates and self.feasible(inside + [row]):
                    candidates.append(row)
            if not candidates:
                return False
            choices.append(candidates)
        if len(choices) <= 1:
            return True
        for combination in itertools.product(*choices):
            if self.feasible(inside + list(combination)):
                return True
        return False


_MAX_PATTERN_SETTINGS = 20


def _inf_weight(
    graph: ActivationGraph,
    vertices: tuple[Vector, ...],
    cones: Sequence[Polyhedron | None],
    margin: Fraction,
) -> tuple[Weight, tuple[Weight, Weight] | None]:
    r"""Smallest weight over the distribution hull and exhaustion bounds."""
    active = [i for i, flag in enumerate(graph.active) if flag]
    upper = min(
        graph.pattern_weight(
            frozenset(i for i in active if cones[i].contains(pi))
        )
        for pi in vertices
    )
    if len(active) > _MAX_PATTERN_SETTINGS:
        lower = graph.pattern_weight(frozenset())
        return None, (lower, upper)
    patterns = [
        frozenset(members)
        for size in range(len(active) + 1)
        for members in itertools.combinations(active, size)
    ]
    patterns = [p for p in patterns if graph.pattern_weight(p) < upper]
    patterns.sort(key=graph.pattern_weight)
    search = _PatternSearch(vertices, cones, margin, config.PATTERN_LIMIT)
    for members in patterns:
        weight = graph.pattern_weight(members)
        excluded = [i for i in active if i not in members]
        try:
            if search.realizable(members, excluded):
                return weight, None
        except SearchExhaustedError:
            return None, (weight, upper)
    return upper, None


def _weight_result(
    weight: Weight,
    mode: str,
    q: int,
    margin: Fraction | None,
) -> ClassificationResult:
    if weight.kind == _NEG_INF:
        return ClassificationResult(
            define.ZERO, mode, _ZERO_BOUND, weight=weight, margin=margin
        )
    if weight.kind == _EXP:
        return ClassificationResult(
            define.EXPONENTIAL, mode, _EXP_BOUND, weight=weight, margin=margin
        )
    exponent = weight.exponent(q)
    return ClassificationResult(
        define.POLY_EXPONENT,
        mode,
        _poly_bound(exponent),
        d0=weight.d0,
        d_delta=weight.d_delta,
        exponent=exponent,
        weight=weight,
        margin=margin,
    )


def classify_multi(
    family: SettingFamily,
    pi_vertices: Sequence,
    n: int,
    budget: Fraction | int | str,
    mode: str = define.SUP,
    *,
    node_limit: int | None = None,
    verbose: bool = False,
) -> ClassificationResult:
    r"""Classify the semi-random likelihood of a setting family.

    Every setting gets the weight
    :math:`d_0 + d_\Delta \min\{2 \log(B + 1) / \log n, 1\}`
    at distributions in its zero cone,
    an exponential weight at all other distributions,
    and :math:`-\infty` if it has no unstable histogram.
    ``"sup"`` takes the largest weight
    over settings and distributions.
    ``"inf"`` takes the smallest over distributions
    of the largest weight over settings,
    enumerating which zero cones a distribution can lie in.
    Strict exclusion from a zero cone
    requires one of its rows to exceed zero
    by at least :math:`1 / M` with :math:`M` = :attr:`config.BIG_M`.

    Budgets above :attr:`config.MULTI_BUDGET_FRACTION`
    times the smallest positive touch threshold times ``n``
    are not classified.

    Args:
        family: setting family
        pi_vertices: vertices of the distribution hull
        n: number of voters
        budget: budget in units of the family prices
        mode: ``"sup"`` or ``"inf"``
        node_limit: branch-and-bound nodes of the integer searches
        verbose: show progress bar

    Returns:
        classification result,
        ``"undetermined"`` with partial ``bounds``
        if the pattern search exceeds :attr:`config.PATTERN_LIMIT`

    Raises:
        ValueError: if ``mode`` is unknown,
            ``n < 1``, the budget is negative
            or a vertex is not a distribution

    Examples:
        >>> half = [Fraction(1, 2), Fraction(1, 2)]
        >>> family = SettingFamily("toy", None, [toy])
        >>> classify_multi(family, [half], 100, 1).case
        'poly-exponent'

    """
    _check_mode(mode)
    budget = family.scaled_budget(_check_size(n, budget))
    vertices = _vertices(pi_vertices)
    summaries = utils.run_tasks(
        _summarize,
        [([setting, vertices, n, budget, node_limit], {}) for setting in family],
        verbose=verbose,
        task_description="Setting conditions",
    )
    if any(s.conditions.c1 is None for s in summaries):
        return ClassificationResult(define.UNDETERMINED, mode, _UNDETERMINED_BOUND)

    positive = [
        s.touch.value
        for s in summaries
        if s.touch is not None and not s.touch.is_infinite and s.touch.value > 0
    ]
    if positive:
        limit = config.MULTI_BUDGET_FRACTION * min(positive) * n
        if budget > limit:
            warnings.warn(
                f"Budget {budget} exceeds {limit}, "
                "multi-setting classification requires a smaller budget."
            )
            return ClassificationResult(
                define.UNDETERMINED, mode, _UNDETERMINED_BOUND
            )

    graph = ActivationGraph(
        n,
        budget,
        tuple(s.weight for s in summaries),
        tuple(s.conditions.c1 is False for s in summaries),
        tuple(not s.conditions.c3 for s in summaries),
    )
    if mode == define.SUP:
        return _weight_result(graph.w_max, mode, family.q, None)

    margin = Fraction(1, config.BIG_M)
    cones = [
        build_cone(setting, ZERO_CONE).polyhedron if active else None
        for setting, active in zip(family, graph.active)
    ]
    weight, bounds = _inf_weight(graph, vertices, cones, margin)
    if weight is None:
        return ClassificationResult(
            define.UNDETERMINED,
            mode,
            _UNDETERMINED_BOUND,
            bounds=bounds,
            margin=margin,
        )
    return _weight_result(weight, mode, family.q, margin)


def _psi_program(
    zero: Polyhedron,
    vertices: tuple[Vector, ...],
    psi: Fraction,
) -> LinearProgram:
    r"""Mixture weights and transfers of mass between rankings.

    Variables are the mixture weights
    followed by the transfers :math:`\kappa_{ij}`
    moving mass from coordinate ``i`` to ``j``.

    """
    t = len(vertices)
    q = zero.dim
    transfers = [(i, j) for i in range(q) for j in range(q) if i != j]
    num_vars = t + len(transfers)

    def moved(a: Vector) -> tuple:
        return tuple(a[j] - a[i] for i, j in transfers)

    rows = [
        (tuple(dot(a, pi) for pi in vertices) + moved(a), Fraction(0))
        for a in zero.A
    ]
    rows.append((zeros(t) + (Fraction(1),) * len(transfers), psi))
    for k in range(q):
        outflow = tuple(Fraction(int(i == k)) for i, _ in transfers)
        rows.append((tuple(-pi[k] for pi in vertices) + outflow, Fraction(0)))
    return LinearProgram(
        num_vars,
        inequalities=rows,
        equalities=[((Fraction(1),) * t + zeros(len(transfers)), 1)],
        lower=(0,) * num_vars,
    )


def _undetermined_psi() -> ClassificationResult:
    return ClassificationResult(define.UNDETERMINED, define.SUP, _UNDETERMINED_BOUND)


_CASE_ORDER = {
    define.ZERO: 0,
    define.EXPONENTIAL: 1,
    define.UNDETERMINED: 2,
    define.CONSTANT: 3,
}


def classify_psi(
    setting: PmvSetting | SettingFamily,
    pi_vertices: Sequence,
    psi: Fraction | int | str,
    n: int,
    budget: Fraction | int | str,
    *,
    node_limit: int | None = None,
) -> ClassificationResult:
    r"""Classify the likelihood with a data adversary.

    The data adversary moves a fraction ``psi`` of the votes.
    The likelihood is zero without unstable histograms,
    exponentially small if no distribution in the hull
    is within transfer distance ``psi`` of the zero cone,
    and bounded away from zero otherwise.
    A family gets the largest case of its settings.

    Budgets above :attr:`config.PSI_BUDGET_CONSTANT` times
    :math:`\sqrt{n}` are not classified.

    Args:
        setting: PMV-instability setting or setting family
        pi_vertices: vertices of the distribution hull
        psi: fraction of modified votes in :math:`(0, 1]`
        n: number of voters
        budget: budget
        node_limit: branch-and-bound nodes of the integer search

    Returns:
        classification result

    Raises:
        ValueError: if ``psi`` is not in :math:`(0, 1]`,
            ``n < 1``, the budget is negative
            or a vertex is not a distribution

    Examples:
        >>> near = [Fraction(9, 20), Fraction(11, 20)]
        >>> classify_psi(toy, [near], "1/10", 100, 1).case
        'constant'
        >>> far = [Fraction(1, 10), Fraction(9, 10)]
        >>> classify_psi(toy, [far], "1/10", 100, 1).case
        'exponential'

    """
    psi = to_fraction(psi)
    if not 0 < psi <= 1:
        raise ValueError(f"psi must be in (0, 1], not {psi}.")
    budget = _check_size(n, budget)
    vertices = _vertices(pi_vertices)
    if isinstance(setting, SettingFamily):
        results = [
            classify_psi(
                member,
                vertices,
                psi,
                n,
                setting.scaled_budget(budget),
                node_limit=node_limit,
            )
            for member in setting
        ]
        return max(results, key=lambda r: _CASE_ORDER[r.case])

    if budget**2 > config.PSI_BUDGET_CONSTANT**2 * n:
        warnings.warn(
            f"Budget {budget} exceeds {config.PSI_BUDGET_CONSTANT}*sqrt({n}), "
            "data adversary classification requires a smaller budget."
        )
        return _undetermined_psi()
    try:
        found = _unstable_histogram(setting, n, budget, node_limit)
    except SearchExhaustedError:
        return _undetermined_psi()
    if found is None:
        return ClassificationResult(define.ZERO, define.SUP, _ZERO_BOUND)
    zero = build_cone(setting, ZERO_CONE).polyhedron
    outcome = lp_solve(_psi_program(zero, vertices, psi))
    if outcome.status == define.INFEASIBLE:
        return ClassificationResult(define.EXPONENTIAL, define.SUP, _EXP_BOUND)
    return ClassificationResult(define.CONSTANT, define.SUP, _CONSTANT_BOUND)
