from collections.abc import Callable
from collections.abc import Iterator
from collections.abc import Sequence
import dataclasses
from fractions import Fraction
import heapq
import itertools
import math

from pmvforge.core import define
from pmvforge.core.arith import Vector
from pmvforge.core.arith import dot
from pmvforge.core.arith import to_fraction
from pmvforge.core.arith import zeros
from pmvforge.core.config import config
from pmvforge.core.elections import Profile
from pmvforge.core.elections import VotingRule
from pmvforge.core.elections import loser
from pmvforge.core.elections import num_alternatives
from pmvforge.core.elections import rankings
from pmvforge.core.elections import winner
from pmvforge.core.lp import LinearProgram
from pmvforge.core.lp import ilp_feasible
from pmvforge.core.settings import PriceTable
from pmvforge.core.settings import SettingFamily
from pmvforge.core.settings import scoring_winner_polyhedron
from pmvforge.core.settings import vote_ops


class CapExceededError(RuntimeError):
    r"""Instance too large for an exhaustive oracle.

    Raised instead of starting a search
    that would not finish in reasonable time.
    The caps are set by :attr:`config.ORACLE_CAPS`.

    """


@dataclasses.dataclass(frozen=True)
class OracleAnswer:
    r"""Answer of an oracle.

    A successful answer carries a witness
    with the histogram of ``"removed"`` votes,
    the histogram of ``"added"`` votes
    and the total ``"cost"``.
    Replaying the witness
    gives the histogram ``hist - removed + added``.

    """

    success: bool
    witness: dict | None = None

    def __bool__(self) -> bool:  # noqa: D105
        return self.success

    def replay(self, hist: Sequence[int]) -> tuple[int, ...]:
        r"""Histogram after applying the witness.

        Raises:
            ValueError: if the answer has no witness

        """
        if self.witness is None:
            raise ValueError("Only successful answers can be replayed.")
        return tuple(
            h - r + a
            for h, r, a in zip(hist, self.witness["removed"], self.witness["added"])
        )


_FAILURE = OracleAnswer(False)


def _answer(
    removed: Sequence[int],
    added: Sequence[int],
    cost: Fraction | int,
) -> OracleAnswer:
    return OracleAnswer(
        True,
        {
            "removed": tuple(int(v) for v in removed),
            "added": tuple(int(v) for v in added),
            "cost": to_fraction(cost),
        },
    )


def _histogram(profile: Profile | Sequence[int]) -> tuple[int, ...]:
    if isinstance(profile, Profile):
        return profile.histogram()
    hist = tuple(int(v) for v in profile)
    if any(v < 0 for v in hist):
        raise ValueError("Histogram entries must be non-negative.")
    num_alternatives(len(hist))
    return hist


def _check_caps(
    hist: Sequence[int],
    budget: int | Fraction,
    caps: dict | None,
):
    limits = dict(config.ORACLE_CAPS)
    limits.update(caps or {})
    n = sum(hist)
    m = num_alternatives(len(hist))
    for name, value in (("n", n), ("m", m), ("b", budget)):
        if value > limits[name]:
            raise CapExceededError(
                f"{name}={value} exceeds the oracle cap {limits[name]}."
            )


def _check_budget(budget: Fraction | int | str) -> Fraction:
    budget = to_fraction(budget)
    if budget < 0:
        raise ValueError(f"Budget must be non-negative, not {budget}.")
    return budget


def _compositions(total: int, limits: Sequence[int]) -> Iterator[tuple[int, ...]]:
    r"""Vectors with entries in ``0..limits[i]`` summing to ``total``."""
    if not limits:
        if total == 0:
            yield ()
        return
    rest = sum(limits[1:])
    for first in range(max(0, total - rest), min(limits[0], total) + 1):
        for tail in _compositions(total - first, limits[1:]):
            yield (first,) + tail


def _replacements(
    hist: tuple[int, ...],
    budget: int,
    allowed: Sequence[bool],
    goal: Callable[[tuple[int, ...]], bool],
) -> OracleAnswer:
    r"""Replace up to ``budget`` votes of allowed rankings by arbitrary votes."""
    q = len(hist)
    limits = [h if ok else 0 for h, ok in zip(hist, allowed)]
    for k in range(1, budget + 1):
        if k > sum(limits):
            break
        for removed in _compositions(k, limits):
            base = tuple(h - r for h, r in zip(hist, removed))
            for added in _compositions(k, [k] * q):
                if goal(tuple(b + a for b, a in zip(base, added))):
                    return _answer(removed, added, k)
    return _FAILURE


def _prefers(a: int, b: int, m: int) -> list[bool]:
    return [ranking.index(a) < ranking.index(b) for ranking in rankings(m)]


def cm(
    rule: VotingRule,
    profile: Profile | Sequence[int],
    budget: int | Fraction | str,
    *,
    caps: dict | None = None,
) -> OracleAnswer:
    r"""Coalitional manipulation by exhaustive search.

    Succeeds if at most ``budget`` voters
    who all prefer some alternative ``b`` to the current winner
    can change their votes so that ``b`` wins.
    Coalitions and replacement votes are enumerated as histograms.

    Args:
        rule: voting rule
        profile: profile or histogram
        budget: largest coalition size
        caps: overrides of :attr:`config.ORACLE_CAPS`

    Returns:
        answer with witness

    Raises:
        ValueError: if the budget is negative
        CapExceededError: if the instance exceeds the caps

    Examples:
        >>> profile = Profile([(1, 2, 3), (2, 1, 3), (3, 2, 1)])
        >>> answer = cm(VotingRule.plurality(3), profile, 1)
        >>> answer.success, answer.witness["removed"]
        (True, (0, 0, 0, 0, 0, 1))

    """
    hist = _histogram(profile)
    budget = math.floor(_check_budget(budget))
    _check_caps(hist, budget, caps)
    m = num_alternatives(len(hist))
    a = winner(rule, hist)
    for b in range(1, m + 1):
        if b == a:
            continue
        answer = _replacements(
            hist,
            budget,
            _prefers(b, a, m),
            lambda h, b=b: winner(rule, h) == b,
        )
        if answer:
            return answer
    return _FAILURE


def cml(
    rule: VotingRule,
    profile: Profile | Sequence[int],
    budget: int | Fraction | str,
    *,
    caps: dict | None = None,
) -> OracleAnswer:
    r"""Coalitional manipulation making the loser win.

    Succeeds if at most ``budget`` voters
    preferring the current loser to the current winner
    can change their votes so that the loser wins.

    Args:
        rule: positional scoring rule
        profile: profile or histogram
        budget: largest coalition size
        caps: overrides of :attr:`config.ORACLE_CAPS`

    Returns:
        answer with witness

    Raises:
        ValueError: if the budget is negative
            or ``rule`` is not a positional scoring rule
        CapExceededError: if the instance exceeds the caps

    """
    hist = _histogram(profile)
    budget = math.floor(_check_budget(budget))
    _check_caps(hist, budget, caps)
    m = num_alternatives(len(hist))
    b = loser(rule, hist)
    a = winner(rule, hist)
    return _replacements(
        hist,
        budget,
        _prefers(b, a, m),
        lambda h: winner(rule, h) == b,
    )


def mov(
    rule: VotingRule,
    profile: Profile | Sequence[int],
    budget: int | Fraction | str,
    *,
    caps: dict | None = None,
) -> OracleAnswer:
    r"""Margin of victory by exhaustive search.

    Succeeds if changing at most ``budget`` votes
    changes the winner,
    regardless of the preferences of the changed voters.

    Args:
        rule: voting rule
        profile: profile or histogram
        budget: largest number of changed votes
        caps: overrides of :attr:`config.ORACLE_CAPS`

    Returns:
        answer with witness

    Raises:
        ValueError: if the budget is negative
        CapExceededError: if the instance exceeds the caps

    Examples:
        >>> mov(VotingRule.plurality(3), Profile([(1, 2, 3)]), 1).success
        True

    """
    hist = _histogram(profile)
    budget = math.floor(_check_budget(budget))
    _check_caps(hist, budget, caps)
    a = winner(rule, hist)
    return _replacements(
        hist,
        budget,
        [True] * len(hist),
        lambda h: winner(rule, h) != a,
    )


def _goal(
    rule: VotingRule,
    d: int,
    constructive: bool,
) -> Callable[[Sequence], bool]:
    def goal(hist: Sequence) -> bool:
        if not sum(hist) > 0:
            return False
        return (winner(rule, hist) == d) == constructive

    return goal


def _split(problem: str, supported: Sequence[str]) -> tuple[str, bool]:
    base = problem[2:] if problem.startswith("e-") else problem
    if base not in supported:
        raise ValueError(
            f"Unknown problem '{problem}', "
            f"expected one of {list(supported)} or their e-variants."
        )
    return base, problem.startswith("e-")


def _check_d(d: int, m: int):
    if not 1 <= d <= m:
        raise ValueError(f"Alternative {d} is not in 1..{m}.")


def control(
    problem: str,
    rule: VotingRule,
    profile: Profile | Sequence[int],
    d: int,
    budget: int | Fraction | str,
    *,
    caps: dict | None = None,
) -> OracleAnswer:
    r"""Control by adding or deleting votes by exhaustive search.

    Constructive problems make ``d`` the winner,
    destructive problems make ``d`` lose.
    Deleting votes must leave at least one vote.
    Effective variants fail if the goal already holds.

    Args:
        problem: ``"CCAV"``, ``"CCDV"``, ``"DCAV"``, ``"DCDV"``
            or their e-variants
        rule: voting rule
        profile: profile or histogram
        d: distinguished alternative
        budget: largest number of added or deleted votes
        caps: overrides of :attr:`config.ORACLE_CAPS`

    Returns:
        answer with witness

    Raises:
        ValueError: if the problem is unknown,
            ``d`` is out of range or the budget is negative
        CapExceededError: if the instance exceeds the caps

    Examples:
        >>> plurality = VotingRule.plurality(3)
        >>> control("CCAV", plurality, Profile([(2, 1, 3)]), 1, 1).success
        True
        >>> control("e-CCAV", plurality, Profile([(1, 2, 3)]), 1, 1).success
        False

    """
    base, effective = _split(problem, define.CONTROL_PROBLEMS)
    hist = _histogram(profile)
    budget = math.floor(_check_budget(budget))
    _check_caps(hist, budget, caps)
    q = len(hist)
    _check_d(d, num_alternatives(q))
    goal = _goal(rule, d, base.startswith("C"))
    if effective and goal(hist):
        return _FAILURE
    adding = base.endswith("AV")
    limits = [budget] * q if adding else list(hist)
    for k in range(budget + 1):
        if k > sum(limits):
            break
        for change in _compositions(k, limits):
            if adding:
                result = tuple(h + c for h, c in zip(hist, change))
            else:
                result = tuple(h - c for h, c in zip(hist, change))
            if goal(result):
                if adding:
                    return _answer(zeros(q), change, k)
                return _answer(change, zeros(q), k)
    return _FAILURE


def _priced_operations(m: int, prices: PriceTable):
    r"""Allowed operations with their source ranking and price."""
    ops = vote_ops(define.GENERALIZED, m)
    result = []
    for row, label in zip(ops.matrix, ops.labels):
        price = prices.price(label)
        if price is None:
            continue
        source = next((i for i, v in enumerate(row) if v < 0), None)
        result.append((tuple(int(v) for v in row), source, price))
    return result


def _bribery_ilp(
    rule: VotingRule,
    hist: tuple[int, ...],
    target: int,
    operations: list,
    budget: Fraction,
    node_limit: int | None,
) -> OracleAnswer:
    q = len(hist)
    num_ops = len(operations)
    polyhedron = scoring_winner_polyhedron(rule.scores, target)
    rows = [(tuple(price for _, _, price in operations), budget)]
    for r in range(q):
        outflow = tuple(Fraction(int(source == r)) for _, source, _ in operations)
        if any(outflow):
            rows.append((outflow, hist[r]))
    for a, b in polyhedron.rows():
        rows.append((tuple(dot(a, row) for row, _, _ in operations), b - dot(a, hist)))
    if any(sum(row) < 0 for row, _, _ in operations):
        rows.append(
            (tuple(-sum(row) for row, _, _ in operations), sum(hist) - 1)
        )
    upper = [
        hist[source] if source is not None else math.floor(budget / price)
        for _, source, price in operations
    ]
    prog = LinearProgram(
        num_ops,
        inequalities=rows,
        lower=(0,) * num_ops,
        upper=upper,
    )
    witness = ilp_feasible(prog, range(num_ops), node_limit=node_limit)
    if witness is None:
        return _FAILURE
    removed = [0] * q
    added = [0] * q
    cost = Fraction(0)
    for count, (row, _, price) in zip(witness, operations):
        cost += count * price
        for i, v in enumerate(row):
            if v < 0:
                removed[i] += int(count)
            elif v > 0:
                added[i] += int(count)
    return _answer(removed, added, cost)


def _bribery_search(
    hist: tuple[int, ...],
    goal: Callable[[Sequence], bool],
    operations: list,
    budget: Fraction,
) -> OracleAnswer:
    r"""Cheapest-first search over untouched votes and current histograms."""
    start = (hist, hist)
    best = {start: Fraction(0)}
    counter = itertools.count()
    heap = [(Fraction(0), next(counter), start)]
    while heap:
        cost, _, state = heapq.heappop(heap)
        if cost > best[state]:
            continue
        untouched, current = state
        if goal(current):
            removed = tuple(h - u for h, u in zip(hist, untouched))
            added = tuple(c - u for c, u in zip(current, untouched))
            return _answer(removed, added, cost)
        for row, source, price in operations:
            new_cost = cost + price
            if new_cost > budget:
                continue
            if source is not None:
                if not untouched[source]:
                    continue
                new_untouched = list(untouched)
                new_untouched[source] -= 1
                new_untouched = tuple(new_untouched)
            else:
                new_untouched = untouched
            new_state = (new_untouched, tuple(c + v for c, v in zip(current, row)))
            if new_cost < best.get(new_state, budget + 1):
                best[new_state] = new_cost
                heapq.heappush(heap, (new_cost, next(counter), new_state))
    return _FAILURE


def bribery(
    problem: str,
    rule: VotingRule,
    profile: Profile | Sequence[int],
    d: int,
    prices: PriceTable,
    budget: int | Fraction | str,
    *,
    caps: dict | None = None,
    node_limit: int | None = None,
) -> OracleAnswer:
    r"""Generalized bribery with anonymous prices.

    The briber changes, deletes or adds votes,
    every original vote is touched at most once,
    and the total price must not exceed the budget.
    Constructive bribery makes ``d`` the winner,
    destructive bribery makes ``d`` lose.
    Effective variants fail if the goal already holds.
    Positional scoring rules are decided
    by an integer program over operation counts,
    all other rules by a cheapest-first search
    limited by :attr:`config.ORACLE_CAPS`.

    Args:
        problem: ``"CB"``, ``"DB"``, ``"e-CB"`` or ``"e-DB"``
        rule: voting rule
        profile: profile or histogram
        d: distinguished alternative
        prices: anonymous prices
        budget: largest total price
        caps: overrides of :attr:`config.ORACLE_CAPS`
        node_limit: branch-and-bound nodes of the integer program

    Returns:
        answer with witness

    Raises:
        ValueError: if the problem is unknown,
            ``d`` is out of range or the budget is negative
        CapExceededError: if a search instance exceeds the caps
        SearchExhaustedError: if the integer program exceeds its node limit

    Examples:
        >>> forbidden = PriceTable(change=None)
        >>> bribery("CB", VotingRule.borda(3), Profile([(2, 1, 3)]), 1, forbidden, 5)
        OracleAnswer(success=False, witness=None)

    """
    base, effective = _split(problem, define.BRIBERY_PROBLEMS)
    hist = _histogram(profile)
    budget = _check_budget(budget)
    m = num_alternatives(len(hist))
    _check_d(d, m)
    constructive = base == "CB"
    goal = _goal(rule, d, constructive)
    if goal(hist):
        if effective:
            return _FAILURE
        return _answer(zeros(len(hist)), zeros(len(hist)), 0)
    operations = _priced_operations(m, prices)
    if not operations:
        return _FAILURE
    if not rule.is_scoring:
        _check_caps(hist, budget, caps)
        return _bribery_search(hist, goal, operations, budget)
    targets = [d] if constructive else [b for b in range(1, m + 1) if b != d]
    for target in targets:
        answer = _bribery_ilp(rule, hist, target, operations, budget, node_limit)
        if answer:
            return answer
    return _FAILURE


def _deficit_reachable(
    a: Vector,
    deficit: Fraction,
    ops: Sequence[Vector],
    costs: Sequence[Fraction],
    budget: Fraction,
) -> bool:
    r"""Whether some operations within the budget can close a row deficit."""
    rates = [-dot(a, op) / c for op, c in zip(ops, costs)]
    best = max(rates)
    return best > 0 and deficit <= budget * best


def membership(
    hist: Sequence[int],
    family: SettingFamily,
    budget: int | Fraction | str,
    *,
    node_limit: int | None = None,
) -> bool:
    r"""Whether a histogram is unstable in some setting of a family.

    For every setting whose source polyhedron contains ``hist``
    an integer program searches operation counts :math:`o \ge 0`
    with :math:`c \cdot o \le B`
    and :math:`hist + o^T O` in the target polyhedron.
    Operations only take votes that exist in ``hist``,
    see :meth:`pmvforge.VoteOperationSet.outflow`.
    Settings where a violated target row
    cannot be repaired within the budget are skipped
    without solving.

    Args:
        hist: integer histogram
        family: setting family
        budget: budget in units of the family prices
        node_limit: branch-and-bound nodes per integer program

    Returns:
        ``True`` if ``hist`` is unstable

    Raises:
        ValueError: if the budget is negative
            or ``hist`` does not match the family
        SearchExhaustedError: if an integer program exceeds its node limit

    Examples:
        >>> family = SettingFamily("toy", None, [toy])
        >>> membership([5, 5], family, 1), membership([5, 5], family, 0)
        (True, False)

    """
    budget = family.scaled_budget(_check_budget(budget))
    if len(hist) != family.q:
        raise ValueError(
            f"Histogram has {len(hist)} entries, expected {family.q}."
        )
    x = tuple(Fraction(v) for v in hist)
    for setting in family:
        if not setting.source.contains(x):
            continue
        ops = setting.ops.matrix
        costs = setting.costs
        violated = [
            (a, dot(a, x) - b) for a, b in setting.target.rows() if dot(a, x) > b
        ]
        if not violated:
            return True
        if not all(
            _deficit_reachable(a, deficit, ops, costs, budget)
            for a, deficit in violated
        ):
            continue
        rows = [(tuple(costs), budget)]
        rows += [(coef, x[r]) for r, coef in setting.ops.outflow()]
        rows += [
            (tuple(dot(a, op) for op in ops), b - dot(a, x))
            for a, b in setting.target.rows()
        ]
        prog = LinearProgram(
            len(ops),
            inequalities=rows,
            lower=(0,) * len(ops),
            upper=tuple(math.floor(budget / c) for c in costs),
        )
        if ilp_feasible(prog, range(len(ops)), node_limit=node_limit) is not None:
            return True
    return False


@dataclasses.dataclass(frozen=True)
class InfluenceQuery:
    r"""Coalitional influence question about a concrete profile.

    Args:
        problem: problem tag,
            one of :data:`pmvforge.core.define.PROBLEMS`
        rule: voting rule
        profile: profile
        budget: budget
        d: distinguished alternative,
            required for control and bribery
        prices: anonymous prices of bribery,
            by default vote changes cost 1

    Raises:
        ValueError: if the problem is unknown,
            ``d`` is missing for control or bribery
            or the budget is negative

    """

    problem: str
    rule: VotingRule
    profile: Profile
    budget: Fraction
    d: int | None = None
    prices: PriceTable | None = None

    def __post_init__(self):
        if self.problem not in define.PROBLEMS:
            raise ValueError(
                f"Unknown problem '{self.problem}', "
                f"expected one of {list(define.PROBLEMS)}."
            )
        base = self.problem.removeprefix("e-")
        needs_d = base in define.CONTROL_PROBLEMS + define.BRIBERY_PROBLEMS
        if needs_d and self.d is None:
            raise ValueError(f"{self.problem} needs a distinguished alternative.")
        object.__setattr__(self, "budget", _check_budget(self.budget))

    def run(
        self,
        *,
        caps: dict | None = None,
        node_limit: int | None = None,
    ) -> OracleAnswer:
        r"""Answer the query with the matching oracle.

        Raises:
            CapExceededError: if the instance exceeds the caps
            SearchExhaustedError: if an integer program exceeds its node limit

        Examples:
            >>> profile = Profile([(1, 2, 3)])
            >>> query = InfluenceQuery("MoV", VotingRule.borda(3), profile, 1)
            >>> query.run().success
            True

        """
        base = self.problem.removeprefix("e-")
        if base == "CM":
            return cm(self.rule, self.profile, self.budget, caps=caps)
        if base == "CML":
            return cml(self.rule, self.profile, self.budget, caps=caps)
        if base == "MoV":
            return mov(self.rule, self.profile, self.budget, caps=caps)
        if base in define.CONTROL_PROBLEMS:
            return control(
                self.problem,
                self.rule,
                self.profile,
                self.d,
                self.budget,
                caps=caps,
            )
        return bribery(
            self.problem,
            self.rule,
            self.profile,
            self.d,
            self.prices or PriceTable(),
            self.budget,
            caps=caps,
            node_limit=node_limit,
        )
