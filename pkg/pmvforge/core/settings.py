from collections.abc import Iterable
from collections.abc import Sequence
import dataclasses
from fractions import Fraction
import math

from pmvforge.core import define
from pmvforge.core.arith import Matrix
from pmvforge.core.arith import Vector
from pmvforge.core.arith import format_fraction
from pmvforge.core.arith import matrix
from pmvforge.core.arith import negate
from pmvforge.core.arith import subtract
from pmvforge.core.arith import to_fraction
from pmvforge.core.arith import unit
from pmvforge.core.arith import vector
from pmvforge.core.elections import Ranking
from pmvforge.core.elections import VotingRule
from pmvforge.core.elections import pair_diff_vector
from pmvforge.core.elections import rankings
from pmvforge.core.elections import score_diff_vector
from pmvforge.core.elections import stv_score_diff_vector
from pmvforge.core.polyhedra import Polyhedron


def _format_ranking(ranking: Ranking) -> str:
    return ">".join(str(a) for a in ranking)


def _prefers(ranking: Ranking, a: int, b: int) -> bool:
    return ranking.index(a) < ranking.index(b)


@dataclasses.dataclass(frozen=True)
class VoteOperationSet:
    r"""Vote operations as rows of an operation matrix.

    Applying operation :math:`k` once
    adds row :math:`O_k` to the histogram.
    Labels describe the operation,
    e.g. ``"2>1>3 -> 2>3>1"`` for a vote change,
    ``"+1>2>3"`` for an added
    and ``"-1>2>3"`` for a deleted vote.

    Args:
        kind: kind of operations,
            one of :data:`pmvforge.core.define.OPERATION_KINDS`
        matrix: operation matrix
        labels: one label per row
        q: number of histogram coordinates

    Raises:
        ValueError: if a row is zero,
            has not ``q`` entries,
            or the number of labels does not match

    """

    kind: str
    matrix: Matrix
    labels: tuple[str, ...]
    q: int

    def __post_init__(self):
        if self.kind not in define.OPERATION_KINDS:
            raise ValueError(
                f"Unknown operation kind '{self.kind}', "
                f"expected one of {list(define.OPERATION_KINDS)}."
            )
        rows = matrix(self.matrix, num_cols=self.q)
        labels = tuple(self.labels)
        if len(rows) != len(labels):
            raise ValueError(f"Expected {len(rows)} labels, got {len(labels)}.")
        for row, label in zip(rows, labels):
            if not any(row):
                raise ValueError(f"Operation '{label}' does not change anything.")
        object.__setattr__(self, "matrix", rows)
        object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:  # noqa: D105
        return len(self.matrix)

    def select(self, labels: Iterable[str]) -> "VoteOperationSet":
        r"""Subset of operations.

        Args:
            labels: labels of the operations to keep

        Returns:
            operations in the order of ``labels``

        Raises:
            ValueError: if a label is unknown

        Examples:
            >>> ops = vote_ops("motivated", 3, 1, 2)
            >>> len(ops.select(["2>1>3 -> 2>3>1", "3>2>1 -> 2>3>1"]))
            2

        """
        index = {label: k for k, label in enumerate(self.labels)}
        rows = []
        selected = []
        for label in labels:
            if label not in index:
                raise ValueError(f"Unknown operation '{label}'.")
            rows.append(self.matrix[index[label]])
            selected.append(label)
        return VoteOperationSet(self.kind, tuple(rows), tuple(selected), self.q)

    def outflow(self) -> tuple[tuple[int, Vector], ...]:
        r"""Votes every operation takes from each ranking.

        Operations change or delete existing votes,
        so a histogram :math:`x` admits counts :math:`o`
        only if :math:`\sum_k o_k \max(0, -O_{kr}) \le x_r`
        for every ranking :math:`r`.
        Rankings no operation takes votes from are left out.

        Returns:
            pairs of ranking index and coefficients per operation

        Examples:
            >>> ops = vote_ops("change", 2)
            >>> [(r, [int(c) for c in coef]) for r, coef in ops.outflow()]
            [(0, [1, 0]), (1, [0, 1])]

        """
        result = []
        for r in range(self.q):
            coefficients = tuple(max(Fraction(0), -row[r]) for row in self.matrix)
            if any(coefficients):
                result.append((r, coefficients))
        return tuple(result)


def vote_ops(
    kind: str,
    m: int,
    a: int | None = None,
    b: int | None = None,
) -> VoteOperationSet:
    r"""Enumerate vote operations over all rankings.

    ``"change"`` replaces any ranking by any other ranking.
    ``"motivated"`` restricts changes to votes preferring ``b`` to ``a``.
    ``"add"`` and ``"delete"`` add or remove one vote,
    ``"generalized"`` is the union of changes, additions and deletions.

    Args:
        kind: kind of operations
        m: number of alternatives
        a: current winner of motivated changes
        b: target of motivated changes

    Returns:
        operation set

    Raises:
        ValueError: if ``kind`` is unknown
            or motivated changes miss two different alternatives

    Examples:
        >>> len(vote_ops("change", 3))
        30
        >>> [int(v) for v in vote_ops("motivated", 3, 1, 2).matrix[7]]
        [0, 0, 1, -1, 0, 0]

    """
    if kind not in define.OPERATION_KINDS:
        raise ValueError(
            f"Unknown operation kind '{kind}', "
            f"expected one of {list(define.OPERATION_KINDS)}."
        )
    all_rankings = rankings(m)
    q = len(all_rankings)
    rows = []
    labels = []

    def changes(motivated: bool):
        for i, source in enumerate(all_rankings):
            if motivated and not _prefers(source, b, a):
                continue
            for j, target in enumerate(all_rankings):
                if i != j:
                    rows.append(subtract(unit(q, j), unit(q, i)))
                    labels.append(
                        f"{_format_ranking(source)} -> {_format_ranking(target)}"
                    )

    if kind == define.MOTIVATED:
        if a is None or b is None or a == b:
            raise ValueError(
                "Motivated changes need two different alternatives, "
                f"got {a} and {b}."
            )
        for x in (a, b):
            if not 1 <= x <= m:
                raise ValueError(f"Alternative {x} is not in 1..{m}.")
        changes(motivated=True)
    if kind in (define.CHANGE, define.GENERALIZED):
        changes(motivated=False)
    if kind in (define.ADD, define.GENERALIZED):
        for i, ranking in enumerate(all_rankings):
            rows.append(unit(q, i))
            labels.append(f"+{_format_ranking(ranking)}")
    if kind in (define.DELETE, define.GENERALIZED):
        for i, ranking in enumerate(all_rankings):
            rows.append(negate(unit(q, i)))
            labels.append(f"-{_format_ranking(ranking)}")
    return VoteOperationSet(kind, tuple(rows), tuple(labels), q)


def operation_kind(label: str) -> str:
    r"""Kind of a single operation from its label.

    Examples:
        >>> operation_kind("+1>2>3")
        'add'

    """
    if "->" in label:
        return define.CHANGE
    if label.startswith("+"):
        return define.ADD
    if label.startswith("-"):
        return define.DELETE
    raise ValueError(f"Cannot read operation label '{label}'.")


class PriceTable:
    r"""Anonymous prices of vote operations.

    Every entry is a price,
    ``None`` to forbid the operation,
    or a dictionary with per-label prices
    and a ``"default"`` entry for all other operations.
    Labels are those of :func:`vote_ops`.

    Args:
        change: prices of vote changes
        add: prices of added votes
        delete: prices of deleted votes

    Raises:
        ValueError: if a price is not positive

    Examples:
        >>> prices = PriceTable(change={"default": 2, "1>2 -> 2>1": 1})
        >>> prices.price("1>2 -> 2>1"), prices.price("2>1 -> 1>2")
        (Fraction(1, 1), Fraction(2, 1))
        >>> prices.price("+1>2") is None
        True

    """

    def __init__(
        self,
        change: object = 1,
        add: object = None,
        delete: object = None,
    ):
        self.entries = {
            define.CHANGE: self._parse(change),
            define.ADD: self._parse(add),
            define.DELETE: self._parse(delete),
        }
        r"""Prices per operation kind."""

    @staticmethod
    def _parse(entry: object) -> dict[str, Fraction | None]:
        if not isinstance(entry, dict):
            entry = {"default": entry}
        result = {"default": None}
        for label, price in entry.items():
            if price is not None:
                price = to_fraction(price)
                if price <= 0:
                    raise ValueError(
                        f"Price of '{label}' must be positive, not {price}."
                    )
            result[label] = price
        return result

    def __eq__(self, other) -> bool:  # noqa: D105
        return isinstance(other, PriceTable) and self.entries == other.entries

    def __repr__(self):  # noqa: D105
        return f"PriceTable({self.to_dict()})"

    def price(self, label: str) -> Fraction | None:
        r"""Price of an operation, ``None`` if it is forbidden."""
        entry = self.entries[operation_kind(label)]
        return entry.get(label, entry["default"])

    def to_dict(self) -> dict:
        r"""Serialize with prices as strings."""
        return {
            kind: {
                label: None if price is None else format_fraction(price)
                for label, price in entry.items()
            }
            for kind, entry in self.entries.items()
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PriceTable":
        r"""Inverse of :meth:`to_dict`.

        Missing kinds are forbidden.

        """
        return cls(
            change=data.get(define.CHANGE),
            add=data.get(define.ADD),
            delete=data.get(define.DELETE),
        )


@dataclasses.dataclass(frozen=True)
class PmvSetting:
    r"""PMV-instability setting.

    A histogram :math:`x` in ``source`` is unstable
    if operations of total cost at most the budget
    move it into ``target``.

    Args:
        name: name of the setting
        source: source polyhedron :math:`H_S`
        target: target polyhedron :math:`H_T`
        ops: vote operations
        costs: positive cost per operation
            with smallest cost 1,
            by default all costs are 1

    Raises:
        ValueError: if dimensions do not match,
            no operation is given,
            or costs are not positive with minimum 1

    """

    name: str
    source: Polyhedron
    target: Polyhedron
    ops: VoteOperationSet
    costs: Vector | None = None

    def __post_init__(self):
        if self.source.dim != self.target.dim or self.ops.q != self.source.dim:
            raise ValueError(
                f"Dimensions of source ({self.source.dim}), "
                f"target ({self.target.dim}) "
                f"and operations ({self.ops.q}) differ."
            )
        if not len(self.ops):
            raise ValueError("A setting needs at least one operation.")
        costs = self.costs
        if costs is None:
            costs = (1,) * len(self.ops)
        costs = vector(costs)
        if len(costs) != len(self.ops):
            raise ValueError(
                f"Expected {len(self.ops)} costs, got {len(costs)}."
            )
        if min(costs) != 1:
            raise ValueError(
                f"Costs must be positive with minimum 1, not {min(costs)}."
            )
        object.__setattr__(self, "costs", costs)

    @property
    def q(self) -> int:
        r"""Number of histogram coordinates."""
        return self.source.dim

    def to_dict(self) -> dict:
        r"""Serialize with rationals as strings."""
        source = self.source.to_dict()
        target = self.target.to_dict()
        return {
            "name": self.name,
            "q": self.q,
            "A_S": source["A"],
            "b_S": source["b"],
            "A_T": target["A"],
            "b_T": target["b"],
            "kind": self.ops.kind,
            "ops": [[format_fraction(v) for v in row] for row in self.ops.matrix],
            "op_labels": list(self.ops.labels),
            "costs": [format_fraction(c) for c in self.costs],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PmvSetting":
        r"""Inverse of :meth:`to_dict`."""
        q = data["q"]
        return cls(
            data["name"],
            Polyhedron(data["A_S"], data["b_S"], q),
            Polyhedron(data["A_T"], data["b_T"], q),
            VoteOperationSet(
                data.get("kind", define.CHANGE),
                data["ops"],
                data["op_labels"],
                q,
            ),
            data.get("costs"),
        )


@dataclasses.dataclass(frozen=True)
class SettingFamily:
    r"""PMV-multi-instability setting of a coalitional influence problem.

    A histogram is unstable
    if it is unstable in at least one member setting.

    Args:
        problem: problem tag,
            one of :data:`pmvforge.core.define.PROBLEMS` or ``"toy"``
        rule: voting rule or ``None``
        settings: member settings
        d: distinguished alternative of control and bribery
        budget_scale: smallest price before normalization,
            budgets in price units are divided by it
        prices: prices of bribery families,
            passed on to the oracles

    Raises:
        ValueError: if ``settings`` is empty
            or members differ in dimension

    """

    problem: str
    rule: VotingRule | None
    settings: tuple[PmvSetting, ...]
    d: int | None = None
    budget_scale: Fraction = Fraction(1)
    prices: PriceTable | None = None

    def __post_init__(self):
        settings = tuple(self.settings)
        if not settings:
            raise ValueError("A family needs at least one setting.")
        if len({s.q for s in settings}) > 1:
            raise ValueError("All settings of a family need the same dimension.")
        object.__setattr__(self, "settings", settings)
        object.__setattr__(self, "budget_scale", to_fraction(self.budget_scale))

    def __len__(self) -> int:  # noqa: D105
        return len(self.settings)

    def __iter__(self):  # noqa: D105
        return iter(self.settings)

    @property
    def q(self) -> int:
        r"""Number of histogram coordinates."""
        return self.settings[0].q

    def scaled_budget(self, budget: Fraction | int | str) -> Fraction:
        r"""Budget in units of the normalized costs.

        Examples:
            >>> family = SettingFamily("toy", None, [toy], budget_scale=2)
            >>> family.scaled_budget(3)
            Fraction(3, 2)

        """
        return to_fraction(budget) / self.budget_scale

    def to_dict(self) -> dict:
        r"""Serialize family."""
        return {
            "problem": self.problem,
            "rule": None if self.rule is None else self.rule.to_dict(),
            "d": self.d,
            "budget_scale": format_fraction(self.budget_scale),
            "prices": None if self.prices is None else self.prices.to_dict(),
            "settings": [s.to_dict() for s in self.settings],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SettingFamily":
        r"""Inverse of :meth:`to_dict`.

        A single serialized setting is accepted
        and wrapped into a family of one.

        """
        if "settings" not in data:
            setting = PmvSetting.from_dict(data)
            return cls(setting.name, None, (setting,))
        rule = data.get("rule")
        prices = data.get("prices")
        return cls(
            data["problem"],
            None if rule is None else VotingRule.from_dict(rule),
            tuple(PmvSetting.from_dict(s) for s in data["settings"]),
            data.get("d"),
            data.get("budget_scale", 1),
            None if prices is None else PriceTable.from_dict(prices),
        )


def toy_setting() -> PmvSetting:
    r"""Two-coordinate setting with closed-form likelihoods.

    :math:`H_S = \{x_1 - x_2 \le 0\}`,
    :math:`H_T = \{x_2 - x_1 \le -1\}`,
    and a single unit-cost operation :math:`(1, -1)`
    turning a ``2>1`` vote into ``1>2``.

    Examples:
        >>> setting = toy_setting()
        >>> setting.source.contains([5, 5]), setting.target.contains([6, 4])
        (True, True)

    """
    return PmvSetting(
        define.TOY_NAME,
        Polyhedron([[1, -1]], [0]),
        Polyhedron([[-1, 1]], [-1]),
        VoteOperationSet(define.CHANGE, ((1, -1),), ("2>1 -> 1>2",), 2),
    )


def toy_family() -> SettingFamily:
    r"""Family holding only :func:`toy_setting`."""
    return SettingFamily(define.TOY_NAME, None, (toy_setting(),))


def _nonnegative(q: int) -> list[tuple[Vector, Fraction]]:
    return [(negate(unit(q, i)), Fraction(0)) for i in range(q)]


def _polyhedron(rows: Sequence[tuple[Vector, int | Fraction]], q: int) -> Polyhedron:
    return Polyhedron([a for a, _ in rows], [b for _, b in rows], q)


def _not_empty(q: int) -> tuple[Vector, Fraction]:
    return (tuple(Fraction(-1) for _ in range(q)), Fraction(-1))


def _scoring_winner_rows(scores: Sequence[int], a: int) -> list:
    m = len(scores)
    return [
        (score_diff_vector(scores, i, a), -1 if i < a else 0)
        for i in range(1, m + 1)
        if i != a
    ]


def scoring_winner_polyhedron(
    scores: Sequence[int],
    a: int,
) -> Polyhedron:
    r"""Histograms won by ``a`` under a positional scoring rule.

    Alternatives with a smaller index need a strictly lower score,
    all others at most the score of ``a``,
    matching lexicographic tie-breaking.

    Args:
        scores: scoring vector
        a: winner

    Returns:
        polyhedron including non-negativity rows

    Raises:
        ValueError: if ``a`` is not an alternative

    Examples:
        >>> len(scoring_winner_polyhedron([2, 1, 0], 2))
        8

    """
    m = len(scores)
    if not 1 <= a <= m:
        raise ValueError(f"Alternative {a} is not in 1..{m}.")
    q = math.factorial(m)
    return _polyhedron(_scoring_winner_rows(scores, a) + _nonnegative(q), q)


def _check_scoring_pair(scores: Sequence[int], a: int, b: int):
    m = len(scores)
    for x in (a, b):
        if not 1 <= x <= m:
            raise ValueError(f"Alternative {x} is not in 1..{m}.")
    if a == b:
        raise ValueError(f"Alternatives must differ, got {a} twice.")


def build_cm_scoring(
    scores: Sequence[int],
    a: int,
    b: int,
) -> PmvSetting:
    r"""Manipulation from ``a`` to ``b`` under a positional scoring rule.

    In the source polyhedron
    ``a`` wins and ``b`` has the second highest score,
    strictly above every other alternative.
    In the target polyhedron ``b`` has the strictly highest score.
    Operations are vote changes of voters preferring ``b`` to ``a``.

    Args:
        scores: scoring vector
        a: winner before manipulation
        b: winner after manipulation

    Returns:
        setting

    Raises:
        ValueError: if ``a == b`` or an alternative is out of range

    Examples:
        >>> setting = build_cm_scoring([2, 1, 0], 1, 2)
        >>> [int(v) for v in setting.source.A[0]]
        [-1, -2, 1, 2, -1, 1]

    """
    _check_scoring_pair(scores, a, b)
    m = len(scores)
    q = math.factorial(m)
    others = [i for i in range(1, m + 1) if i not in (a, b)]
    source = [(score_diff_vector(scores, b, a), 0 if a < b else -1)]
    source += [(score_diff_vector(scores, i, b), -1) for i in others]
    target = [
        (score_diff_vector(scores, i, b), -1) for i in range(1, m + 1) if i != b
    ]
    return PmvSetting(
        f"CM {a}->{b}",
        _polyhedron(source + _nonnegative(q), q),
        _polyhedron(target + _nonnegative(q), q),
        vote_ops(define.MOTIVATED, m, a, b),
    )


def build_cml_scoring(
    scores: Sequence[int],
    a: int,
    b: int,
) -> PmvSetting:
    r"""Manipulation making the loser ``b`` win against the winner ``a``.

    In the source polyhedron ``a`` wins and ``b`` loses,
    in the target polyhedron ``b`` wins.
    Ties follow lexicographic tie-breaking,
    among the lowest scores the largest index loses.

    Args:
        scores: scoring vector
        a: winner before manipulation
        b: loser before and winner after manipulation

    Returns:
        setting

    Raises:
        ValueError: if ``a == b``,
            an alternative is out of range,
            or the rule is veto

    Examples:
        >>> build_cml_scoring([1, 1, 0], 1, 2)
        Traceback (most recent call last):
        ...
        ValueError: Under veto the loser never wins by manipulation.

    """
    _check_scoring_pair(scores, a, b)
    m = len(scores)
    if VotingRule.scoring(scores).is_veto:
        raise ValueError("Under veto the loser never wins by manipulation.")
    q = math.factorial(m)
    source = _scoring_winner_rows(scores, a)
    source += [
        (score_diff_vector(scores, b, i), -1 if i > b else 0)
        for i in range(1, m + 1)
        if i not in (a, b)
    ]
    target = _scoring_winner_rows(scores, b)
    return PmvSetting(
        f"CML {a}->{b}",
        _polyhedron(source + _nonnegative(q), q),
        _polyhedron(target + _nonnegative(q), q),
        vote_ops(define.MOTIVATED, m, a, b),
    )


def _edge(a: int, b: int, m: int) -> tuple[Vector, int]:
    r"""Row of a strictly positive edge ``a -> b``."""
    return (pair_diff_vector(b, a, m), -1)


def _pairwise_polyhedra(m: int) -> tuple[Polyhedron, Polyhedron]:
    q = math.factorial(m)
    edges = [_edge(1, 2, m), _edge(2, 3, m), _edge(3, 1, m)]
    edges += [_edge(a, i, m) for a in (1, 2, 3) for i in range(4, m + 1)]
    p12 = pair_diff_vector(1, 2, m)
    p23 = pair_diff_vector(2, 3, m)
    p31 = pair_diff_vector(3, 1, m)
    heavier = [(subtract(p12, pair_diff_vector(1, i, m)), -1) for i in range(4, m + 1)]
    source = edges + heavier + [(subtract(p12, p23), -1), (subtract(p31, p12), 0)]
    target = edges + heavier + [(subtract(p31, p23), -1), (subtract(p12, p31), -1)]
    return (
        _polyhedron(source + _nonnegative(q), q),
        _polyhedron(target + _nonnegative(q), q),
    )


def build_cm_pairwise(rule: VotingRule) -> PmvSetting:
    r"""Manipulation from 1 to 2 under ranked pairs, Schulze or maximin.

    The source polyhedron has the cycle ``1 -> 2 -> 3 -> 1``
    with :math:`w(2 \to 3) > w(1 \to 2) \ge w(3 \to 1)`,
    the target polyhedron
    :math:`w(2 \to 3) > w(3 \to 1) > w(1 \to 2)`.
    Alternatives 1, 2 and 3 beat all others
    and every edge from 1 to another alternative
    outweighs :math:`w(1 \to 2)`.

    Args:
        rule: ranked pairs, Schulze or maximin rule

    Returns:
        setting

    Raises:
        ValueError: if the rule is not supported or has less than 3 alternatives

    Examples:
        >>> setting = build_cm_pairwise(VotingRule.schulze(3))
        >>> len(setting.source), len(setting.target)
        (11, 11)

    """
    if rule.family not in ("ranked-pairs", "schulze", "maximin"):
        raise ValueError(
            f"Expected ranked pairs, Schulze or maximin, not {rule.family}."
        )
    _check_three(rule.m)
    source, target = _pairwise_polyhedra(rule.m)
    return PmvSetting(
        f"CM {rule.name} 1->2",
        source,
        target,
        vote_ops(define.MOTIVATED, rule.m, 1, 2),
    )


def _check_three(m: int):
    if m < 3:
        raise ValueError(f"Construction needs at least 3 alternatives, not {m}.")


def _stv_polyhedra(m: int) -> tuple[Polyhedron, Polyhedron]:
    q = math.factorial(m)
    chain = []
    for i in range(1, m - 2):
        dropped = m + 1 - i
        removed = set(range(dropped + 1, m + 1))
        chain += [
            (stv_score_diff_vector(removed, dropped, other, m), -1)
            for other in range(1, dropped)
        ]
    late = set(range(4, m + 1))
    third_beats_first = (stv_score_diff_vector(late, 1, 3, m), -1)
    second_beats_third = (stv_score_diff_vector(late | {1}, 3, 2, m), -1)
    source = chain + [
        (stv_score_diff_vector(late, 2, 1, m), 0),
        third_beats_first,
        second_beats_third,
        (stv_score_diff_vector(late | {2}, 3, 1, m), -1),
    ]
    target = chain + [
        (stv_score_diff_vector(late, 1, 2, m), -1),
        third_beats_first,
        second_beats_third,
    ]
    return (
        _polyhedron(source + _nonnegative(q), q),
        _polyhedron(target + _nonnegative(q), q),
    )


def build_cm_stv(m: int) -> PmvSetting:
    r"""Manipulation from 1 to 2 under STV.

    Alternatives ``m, m - 1, ..., 4`` drop out one per round
    with a strictly lowest plurality score.
    With three alternatives left,
    3 has a strictly higher score than 1.
    In the source polyhedron 2 has at most the score of 1
    and drops out,
    then 1 beats 3.
    In the target polyhedron 1 has a strictly lower score than 2
    and drops out,
    then 2 beats 3.

    Args:
        m: number of alternatives

    Returns:
        setting

    Raises:
        ValueError: if ``m < 3``

    Examples:
        >>> setting = build_cm_stv(4)
        >>> len(setting.source)
        31

    """
    _check_three(m)
    source, target = _stv_polyhedra(m)
    return PmvSetting(
        "CM stv 1->2",
        source,
        target,
        vote_ops(define.MOTIVATED, m, 1, 2),
    )


def _copeland_rows(m: int, variant: str) -> list:
    r"""Copeland constructions of the source and target polyhedra.

    ``"cycle"`` has edges ``1 -> 3 -> 2 -> 1``,
    ``"condorcet"`` has edges ``1 -> 3``, ``2 -> 1`` and ``2 -> 3``,
    ``"tied-23"`` and ``"tied-32"`` have edges ``1 -> 3`` and ``2 -> 1``
    and forbid the edge ``3 -> 2``, respectively ``2 -> 3``.
    Alternatives 1, 2 and 3 beat all others.

    """
    rows = [_edge(a, i, m) for a in (1, 2, 3) for i in range(4, m + 1)]
    rows += [_edge(1, 3, m), _edge(2, 1, m)]
    if variant == "cycle":
        rows.append(_edge(3, 2, m))
    elif variant == "condorcet":
        rows.append(_edge(2, 3, m))
    elif variant == "tied-23":
        rows.append((pair_diff_vector(3, 2, m), 0))
    else:
        rows.append((pair_diff_vector(2, 3, m), 0))
    return rows


def _copeland_polyhedra(
    m: int,
    source: str,
    target: str,
) -> tuple[Polyhedron, Polyhedron]:
    q = math.factorial(m)
    return (
        _polyhedron(_copeland_rows(m, source) + _nonnegative(q), q),
        _polyhedron(_copeland_rows(m, target) + _nonnegative(q), q),
    )


def _copeland_cm_variants(alpha: Fraction, parity: str) -> tuple[str, str]:
    if parity == define.ODD:
        return "cycle", "condorcet"
    if alpha > 0:
        return "cycle", "tied-23"
    return "tied-32", "condorcet"


def _check_parity(parity: str):
    if parity not in (define.ODD, define.EVEN):
        raise ValueError(
            f"Unknown parity '{parity}', expected one of {[define.ODD, define.EVEN]}."
        )


def build_cm_copeland(
    alpha: Fraction | int | str,
    parity: str,
    m: int,
) -> PmvSetting:
    r"""Manipulation from 1 to 2 under Copeland.

    For an odd number of voters
    the source polyhedron has the cycle ``1 -> 3 -> 2 -> 1``
    and in the target polyhedron 2 beats 1 and 3.
    For an even number of voters and :math:`\alpha > 0`
    the target polyhedron only requires 3 not to beat 2,
    for :math:`\alpha = 0`
    the source polyhedron only requires 2 not to beat 3.
    Alternatives 1, 2 and 3 beat all others.

    Args:
        alpha: points per tie
        parity: ``"odd"`` or ``"even"`` number of voters
        m: number of alternatives

    Returns:
        setting

    Raises:
        ValueError: if ``alpha`` is not in :math:`[0, 1]`,
            ``parity`` is unknown or ``m < 3``

    Examples:
        >>> odd = build_cm_copeland(0, "odd", 3)
        >>> even = build_cm_copeland(0, "even", 3)
        >>> odd.source == even.source
        False

    """
    alpha = to_fraction(alpha)
    if not 0 <= alpha <= 1:
        raise ValueError(f"Copeland alpha must be in [0, 1], not {alpha}.")
    _check_parity(parity)
    _check_three(m)
    source, target = _copeland_polyhedra(m, *_copeland_cm_variants(alpha, parity))
    return PmvSetting(
        f"CM copeland-{alpha} {parity} 1->2",
        source,
        target,
        vote_ops(define.MOTIVATED, m, 1, 2),
    )


def _construction_polyhedra(
    rule: VotingRule,
    parity: str,
) -> tuple[Polyhedron, Polyhedron]:
    m = rule.m
    _check_three(m)
    if rule.family in ("ranked-pairs", "schulze", "maximin"):
        return _pairwise_polyhedra(m)
    if rule.family == "stv":
        return _stv_polyhedra(m)
    if rule.family == "copeland":
        _check_parity(parity)
        return _copeland_polyhedra(m, *_copeland_cm_variants(rule.alpha, parity))
    raise ValueError(f"No construction available for {rule.family}.")


def _copeland_control_polyhedra(
    rule: VotingRule,
    parity: str,
) -> tuple[Polyhedron, Polyhedron]:
    _check_parity(parity)
    _check_three(rule.m)
    if rule.alpha == 0:
        raise ValueError("Control is not supported for Copeland with alpha 0.")
    if parity == define.ODD:
        return _copeland_polyhedra(rule.m, "cycle", "tied-23")
    return _copeland_polyhedra(rule.m, "tied-32", "condorcet")


def _with_row(polyhedron: Polyhedron, row: tuple[Vector, Fraction]) -> Polyhedron:
    return Polyhedron(
        polyhedron.A + (row[0],),
        polyhedron.b + (row[1],),
        polyhedron.dim,
    )


def _priced_ops(
    m: int,
    prices: PriceTable,
) -> tuple[VoteOperationSet, Vector, Fraction]:
    r"""Allowed generalized operations, normalized costs and smallest price."""
    ops = vote_ops(define.GENERALIZED, m)
    labels = [label for label in ops.labels if prices.price(label) is not None]
    if not labels:
        raise ValueError("All operations are forbidden by the price table.")
    ops = ops.select(labels)
    raw = [prices.price(label) for label in labels]
    scale = min(raw)
    return ops, tuple(p / scale for p in raw), scale


def _split_problem(problem: str) -> tuple[str, bool]:
    if problem not in define.PROBLEMS:
        raise ValueError(
            f"Unknown problem '{problem}', expected one of {list(define.PROBLEMS)}."
        )
    if problem.startswith("e-"):
        return problem[2:], True
    return problem, False


def _control_ops(base: str, m: int, prices: PriceTable | None):
    if base in ("CCAV", "DCAV"):
        return vote_ops(define.ADD, m), None, Fraction(1)
    if base in ("CCDV", "DCDV"):
        return vote_ops(define.DELETE, m), None, Fraction(1)
    return _priced_ops(m, prices or PriceTable())


def _scoring_family(
    problem: str,
    rule: VotingRule,
    d: int | None,
    prices: PriceTable | None,
) -> tuple[list[PmvSetting], Fraction]:
    base, effective = _split_problem(problem)
    scores = rule.scores
    m = rule.m
    q = math.factorial(m)
    alternatives = range(1, m + 1)
    pairs = [(a, b) for a in alternatives for b in alternatives if a != b]
    if base == "CM":
        settings = [
            PmvSetting(
                f"CM {a}->{b}",
                scoring_winner_polyhedron(scores, a),
                scoring_winner_polyhedron(scores, b),
                vote_ops(define.MOTIVATED, m, a, b),
            )
            for a, b in pairs
        ]
        return settings, Fraction(1)
    if base == "MoV":
        change = vote_ops(define.CHANGE, m)
        settings = [
            PmvSetting(
                f"MoV {a}->{b}",
                scoring_winner_polyhedron(scores, a),
                scoring_winner_polyhedron(scores, b),
                change,
            )
            for a, b in pairs
        ]
        return settings, Fraction(1)
    if base == "CML":
        return [build_cml_scoring(scores, a, b) for a, b in pairs], Fraction(1)

    ops, costs, scale = _control_ops(base, m, prices)
    deletes = any(sum(row) < 0 for row in ops.matrix)
    constructive = base.startswith("C")
    targets = [d] if constructive else [b for b in alternatives if b != d]
    if not effective:
        sources = [(None, _polyhedron(_nonnegative(q), q))]
    elif constructive:
        sources = [
            (a, scoring_winner_polyhedron(scores, a)) for a in alternatives if a != d
        ]
    else:
        sources = [(d, scoring_winner_polyhedron(scores, d))]
    settings = []
    for a, source in sources:
        for b in targets:
            target = scoring_winner_polyhedron(scores, b)
            if deletes:
                target = _with_row(target, _not_empty(q))
            prefix = "any" if a is None else str(a)
            settings.append(
                PmvSetting(f"{problem} {prefix}->{b}", source, target, ops, costs)
            )
    return settings, scale


def _construction_family(
    problem: str,
    rule: VotingRule,
    d: int | None,
    parity: str,
) -> list[PmvSetting]:
    base, effective = _split_problem(problem)
    m = rule.m
    if base in ("CM", "MoV"):
        source, target = _construction_polyhedra(rule, parity)
        if base == "CM":
            ops = vote_ops(define.MOTIVATED, m, 1, 2)
        else:
            ops = vote_ops(define.CHANGE, m)
        return [PmvSetting(f"{base} {rule.name} 1->2", source, target, ops)]
    if not effective or base not in define.CONTROL_PROBLEMS:
        raise ValueError(
            f"{problem} is only supported for positional scoring rules, "
            f"not {rule.family}."
        )
    if d not in (1, 2):
        raise ValueError(
            f"{problem} under {rule.family} is supported for d in [1, 2], not {d}."
        )
    if rule.family == "copeland":
        source, target = _copeland_control_polyhedra(rule, parity)
    else:
        source, target = _construction_polyhedra(rule, parity)
    # constructive d=2 and destructive d=1 move from "1 wins" to "2 wins"
    if (base.startswith("C") and d == 1) or (base.startswith("D") and d == 2):
        source, target = target, source
    ops, _, _ = _control_ops(base, m, None)
    if base.endswith("DV"):
        target = _with_row(target, _not_empty(math.factorial(m)))
    return [PmvSetting(f"{problem} {rule.name} d={d}", source, target, ops)]


def build_family(
    problem: str,
    rule: VotingRule,
    *,
    d: int | None = None,
    prices: PriceTable | None = None,
    parity: str = define.ODD,
) -> SettingFamily:
    r"""Represent a coalitional influence problem by a family of settings.

    A histogram is a yes-instance of the problem
    if and only if it is unstable in some member setting.
    For positional scoring rules every problem is supported:
    manipulation and margin of victory
    get one setting per ordered pair of winners,
    control and bribery
    one setting per combination of source and target winner.
    Effective variants restrict the source
    to histograms where the goal is not yet achieved.

    For ranked pairs, Schulze, maximin, STV and Copeland
    the family holds the single construction
    changing the winner from 1 to 2,
    read backwards for the distinguished alternative ``d = 1``
    of constructive control
    and ``d = 2`` of destructive control.
    Only manipulation, margin of victory
    and the effective control problems are supported.

    Args:
        problem: problem tag,
            one of :data:`pmvforge.core.define.PROBLEMS`
        rule: voting rule
        d: distinguished alternative of control and bribery
        prices: prices of bribery,
            by default vote changes cost 1
            and additions and deletions are forbidden
        parity: ``"odd"`` or ``"even"`` number of voters,
            selects the Copeland construction

    Returns:
        setting family

    Raises:
        ValueError: if the combination of problem and rule is not supported,
            or ``d`` is missing or out of range

    Examples:
        >>> len(build_family("CM", VotingRule.borda(3)))
        6
        >>> len(build_family("e-CCAV", VotingRule.borda(3), d=2))
        2

    """
    base, _ = _split_problem(problem)
    needs_d = base in define.CONTROL_PROBLEMS + define.BRIBERY_PROBLEMS
    if needs_d and (d is None or not 1 <= d <= rule.m):
        raise ValueError(f"{problem} needs an alternative d in 1..{rule.m}, not {d}.")
    if not needs_d:
        d = None
    if rule.is_scoring:
        settings, scale = _scoring_family(problem, rule, d, prices)
    else:
        settings = _construction_family(problem, rule, d, parity)
        scale = Fraction(1)
    if base not in define.BRIBERY_PROBLEMS:
        prices = None
    return SettingFamily(problem, rule, tuple(settings), d, scale, prices)
