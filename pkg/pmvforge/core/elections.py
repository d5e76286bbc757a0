from collections.abc import Callable
from collections.abc import Iterable
from collections.abc import Sequence
import dataclasses
from fractions import Fraction
import functools
import itertools
import math

from pmvforge.core.arith import Vector
from pmvforge.core.arith import to_fraction
from pmvforge.core.arith import vector


Ranking = tuple[int, ...]
r"""Alternatives ``1..m`` from most to least preferred."""


@functools.cache
def rankings(m: int) -> tuple[Ranking, ...]:
    r"""All rankings over ``m`` alternatives in canonical order.

    The canonical order is the lexicographic order
    of the permutation sequences.

    Args:
        m: number of alternatives

    Returns:
        ``m!`` rankings

    Raises:
        ValueError: if ``m < 1``

    Examples:
        >>> rankings(3)
        ((1, 2, 3), (1, 3, 2), (2, 1, 3), (2, 3, 1), (3, 1, 2), (3, 2, 1))

    """
    if m < 1:
        raise ValueError(f"Number of alternatives must be positive, not {m}.")
    return tuple(itertools.permutations(range(1, m + 1)))


@functools.cache
def _index_map(m: int) -> dict[Ranking, int]:
    return {ranking: i for i, ranking in enumerate(rankings(m))}


@functools.cache
def _positions(m: int) -> tuple[tuple[int, ...], ...]:
    r"""Per ranking the 0-based position of alternative ``a`` at ``[a - 1]``."""
    result = []
    for ranking in rankings(m):
        pos = [0] * m
        for p, a in enumerate(ranking):
            pos[a - 1] = p
        result.append(tuple(pos))
    return tuple(result)


def ranking_index(ranking: Sequence[int]) -> int:
    r"""Canonical index of a ranking.

    Raises:
        ValueError: if ``ranking`` is not a permutation of ``1..m``

    Examples:
        >>> ranking_index((2, 3, 1))
        3

    """
    ranking = tuple(ranking)
    try:
        return _index_map(len(ranking))[ranking]
    except (KeyError, ValueError):
        raise ValueError(f"'{ranking}' is not a ranking of 1..{len(ranking)}.")


def num_alternatives(q: int) -> int:
    r"""Number of alternatives ``m`` with ``m! = q``.

    Raises:
        ValueError: if ``q`` is not a factorial

    """
    m = 1
    while math.factorial(m) < q:
        m += 1
    if math.factorial(m) != q:
        raise ValueError(f"Length {q} is not the number of rankings of any m.")
    return m


@dataclasses.dataclass(frozen=True)
class Profile:
    r"""Multiset of votes.

    Args:
        votes: rankings over ``1..m``
        m: number of alternatives,
            inferred from the first vote if missing

    Raises:
        ValueError: if a vote is not a ranking of ``1..m``

    Examples:
        >>> Profile([(1, 2, 3), (3, 2, 1)]).histogram()
        (1, 0, 0, 0, 0, 1)

    """

    votes: tuple[Ranking, ...]
    m: int | None = None

    def __post_init__(self):
        votes = tuple(tuple(vote) for vote in self.votes)
        m = self.m
        if m is None:
            if not votes:
                raise ValueError("Cannot infer alternatives of an empty profile.")
            m = len(votes[0])
        for vote in votes:
            if len(vote) != m:
                raise ValueError(f"'{vote}' is not a ranking of 1..{m}.")
            ranking_index(vote)
        object.__setattr__(self, "votes", votes)
        object.__setattr__(self, "m", m)

    @property
    def n(self) -> int:
        r"""Number of votes."""
        return len(self.votes)

    def histogram(self) -> tuple[int, ...]:
        r"""Count vector over rankings in canonical order."""
        counts = [0] * math.factorial(self.m)
        index = _index_map(self.m)
        for vote in self.votes:
            counts[index[vote]] += 1
        return tuple(counts)

    @classmethod
    def from_histogram(cls, hist: Sequence[int]) -> "Profile":
        r"""Profile with votes in canonical ranking order.

        Raises:
            ValueError: if counts are negative or not integers

        """
        m = num_alternatives(len(hist))
        votes = []
        for ranking, count in zip(rankings(m), hist):
            if count < 0 or int(count) != count:
                raise ValueError(f"Histogram entries must be counts, not {count}.")
            votes.extend([ranking] * int(count))
        return cls(tuple(votes), m)


def histogram(profile: Profile) -> tuple[int, ...]:
    r"""Histogram of a profile.

    Examples:
        >>> histogram(Profile([(2, 1, 3), (2, 1, 3)]))
        (0, 0, 2, 0, 0, 0)

    """
    return profile.histogram()


def parse_profile(
    text: str,
    m: int | None = None,
) -> Profile:
    r"""Parse profile text.

    One vote per line as ``k: a>b>c``,
    where the multiplicity ``k`` is optional.
    Empty lines and lines starting with ``#`` are skipped.

    Args:
        text: profile text
        m: number of alternatives,
            inferred from the first vote if missing

    Returns:
        profile

    Raises:
        ValueError: if a line cannot be parsed

    Examples:
        >>> parse_profile("2: 1>2>3\n3>2>1").n
        3

    """
    votes = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        count = 1
        if ":" in line:
            count, line = line.split(":", 1)
            try:
                count = int(count)
            except ValueError:
                raise ValueError(f"Invalid multiplicity '{count}'.")
            if count < 0:
                raise ValueError(f"Invalid multiplicity '{count}'.")
        try:
            vote = tuple(int(a) for a in line.split(">"))
        except ValueError:
            raise ValueError(f"Invalid vote '{line.strip()}'.")
        votes.extend([vote] * count)
    return Profile(tuple(votes), m)


def format_profile(profile: Profile) -> str:
    r"""Serialize profile as text, one line per distinct ranking.

    Examples:
        >>> print(format_profile(Profile([(1, 2, 3), (1, 2, 3), (3, 2, 1)])))
        2: 1>2>3
        1: 3>2>1

    """
    lines = []
    for ranking, count in zip(rankings(profile.m), profile.histogram()):
        if count:
            lines.append(f"{count}: {'>'.join(str(a) for a in ranking)}")
    return "\n".join(lines)


@dataclasses.dataclass(frozen=True)
class Distribution:
    r"""Strictly positive distribution over rankings.

    Args:
        probabilities: one probability per ranking in canonical order
        epsilon: declared lower bound of every probability

    Raises:
        ValueError: if probabilities do not sum to one,
            an entry is below ``epsilon``,
            ``epsilon`` is not positive
            or the length is not ``m!``

    """

    probabilities: Vector
    epsilon: Fraction

    def __post_init__(self):
        probabilities = vector(self.probabilities)
        epsilon = to_fraction(self.epsilon)
        num_alternatives(len(probabilities))
        if epsilon <= 0:
            raise ValueError(f"Epsilon must be positive, not {epsilon}.")
        if sum(probabilities) != 1:
            raise ValueError(
                f"Probabilities must sum to 1, not {sum(probabilities)}."
            )
        if min(probabilities) < epsilon:
            raise ValueError(
                f"Probability {min(probabilities)} is below epsilon {epsilon}."
            )
        object.__setattr__(self, "probabilities", probabilities)
        object.__setattr__(self, "epsilon", epsilon)

    @property
    def m(self) -> int:
        r"""Number of alternatives."""
        return num_alternatives(len(self.probabilities))

    @classmethod
    def from_values(
        cls,
        values: Iterable,
        epsilon: Fraction | str | None = None,
    ) -> "Distribution":
        r"""Create distribution, ``epsilon`` defaults to the smallest entry.

        Examples:
            >>> Distribution.from_values(["2/5", "3/5"]).epsilon
            Fraction(2, 5)

        """
        probabilities = vector(values)
        if epsilon is None:
            epsilon = min(probabilities) if probabilities else Fraction(0)
        return cls(probabilities, epsilon)


def uniform_distribution(m: int) -> Distribution:
    r"""Uniform distribution over all rankings of ``m`` alternatives.

    Examples:
        >>> uniform_distribution(2).probabilities
        (Fraction(1, 2), Fraction(1, 2))

    """
    q = math.factorial(m)
    return Distribution((Fraction(1, q),) * q, Fraction(1, q))


def _check_pair(a: int, b: int, m: int):
    for x in (a, b):
        if not 1 <= x <= m:
            raise ValueError(f"Alternative {x} is not in 1..{m}.")
    if a == b:
        raise ValueError(f"Alternatives must differ, got {a} twice.")


def score_diff_vector(
    scores: Sequence[int],
    a: int,
    b: int,
) -> Vector:
    r"""Score difference vector of a positional scoring rule.

    The entry at ranking :math:`R` is
    :math:`s(\text{rank of } a) - s(\text{rank of } b)`.

    Args:
        scores: scoring vector :math:`(s_1, \dots, s_m)`
        a: first alternative
        b: second alternative

    Returns:
        vector over rankings in canonical order

    Raises:
        ValueError: if ``a == b`` or an alternative is out of range

    Examples:
        >>> [int(v) for v in score_diff_vector([2, 1, 0], 1, 2)]
        [1, 2, -1, -2, 1, -1]

    """
    m = len(scores)
    _check_pair(a, b, m)
    return tuple(
        Fraction(scores[pos[a - 1]] - scores[pos[b - 1]]) for pos in _positions(m)
    )


def pair_diff_vector(a: int, b: int, m: int) -> Vector:
    r"""Pairwise difference vector.

    ``+1`` at rankings preferring ``a`` to ``b``, ``-1`` elsewhere.

    Raises:
        ValueError: if ``a == b`` or an alternative is out of range

    Examples:
        >>> [int(v) for v in pair_diff_vector(1, 2, 3)]
        [1, 1, -1, -1, 1, -1]

    """
    _check_pair(a, b, m)
    return tuple(
        Fraction(1 if pos[a - 1] < pos[b - 1] else -1) for pos in _positions(m)
    )


def _top(ranking: Ranking, removed: Iterable[int]) -> int:
    return next(a for a in ranking if a not in removed)


def stv_score_diff_vector(
    removed: Iterable[int],
    a: int,
    b: int,
    m: int,
) -> Vector:
    r"""Plurality score difference after removing alternatives.

    The entry at ranking :math:`R` is
    1 if ``a`` tops :math:`R` after deleting ``removed``,
    -1 if ``b`` does,
    0 otherwise.

    Raises:
        ValueError: if ``a == b``
            or ``a`` or ``b`` are removed

    Examples:
        >>> [int(v) for v in stv_score_diff_vector({3}, 1, 2, 3)]
        [1, 1, -1, -1, 1, -1]

    """
    _check_pair(a, b, m)
    removed = set(removed)
    if a in removed or b in removed:
        raise ValueError(f"Alternatives {a} and {b} must not be removed.")
    result = []
    for ranking in rankings(m):
        top = _top(ranking, removed)
        result.append(Fraction(int(top == a) - int(top == b)))
    return tuple(result)


def wmg(hist: Sequence) -> tuple[tuple[Fraction, ...], ...]:
    r"""Weighted majority graph.

    Entry ``[a - 1][b - 1]`` holds the weight of edge ``a -> b``,
    i.e. the number of votes preferring ``a`` to ``b``
    minus the number preferring ``b`` to ``a``.

    Examples:
        >>> w = wmg(Profile([(1, 2, 3)]).histogram())
        >>> int(w[0][1]), int(w[1][0])
        (1, -1)

    """
    m = num_alternatives(len(hist))
    w = [[Fraction(0)] * m for _ in range(m)]
    for pos, count in zip(_positions(m), hist):
        if not count:
            continue
        for a in range(m):
            for b in range(a + 1, m):
                delta = count if pos[a] < pos[b] else -count
                w[a][b] += delta
                w[b][a] -= delta
    return tuple(tuple(row) for row in w)


class VotingRule:
    r"""Voting rule with lexicographic tie-breaking.

    Rules are created with the class methods,
    e.g. :meth:`VotingRule.borda`,
    or by name with :meth:`VotingRule.from_name`.

    Args:
        family: rule family,
            one of :attr:`VotingRule.families`
        m: number of alternatives
        scores: scoring vector of a positional scoring rule
        alpha: tie points of Copeland

    Raises:
        ValueError: if the family is unknown,
            the scoring vector is not non-increasing
            with :math:`s_1 > s_m`,
            or ``alpha`` is not in :math:`[0, 1]`

    Examples:
        >>> VotingRule.borda(3)
        VotingRule('scoring', 3, scores=(2, 1, 0))

    """

    families = (
        "scoring",
        "copeland",
        "biased-copeland",
        "maximin",
        "ranked-pairs",
        "schulze",
        "stv",
        "plurality-runoff",
    )
    r"""Supported rule families."""

    def __init__(
        self,
        family: str,
        m: int,
        *,
        scores: Sequence[int] | None = None,
        alpha: Fraction | str | None = None,
    ):
        if family not in self.families:
            raise ValueError(
                f"Unknown rule family '{family}', "
                f"expected one of {list(self.families)}."
            )
        if m < 2:
            raise ValueError(f"A rule needs at least 2 alternatives, not {m}.")
        if family == "scoring":
            if scores is None or len(scores) != m:
                raise ValueError(f"A scoring rule needs {m} scores, got {scores}.")
            scores = tuple(int(s) for s in scores)
            increasing = any(s < t for s, t in zip(scores, scores[1:]))
            if increasing or scores[0] == scores[-1]:
                raise ValueError(
                    f"Scores must be non-increasing with s_1 > s_m, not {scores}."
                )
        else:
            scores = None
        if family == "copeland":
            alpha = to_fraction(Fraction(1, 2) if alpha is None else alpha)
            if not 0 <= alpha <= 1:
                raise ValueError(f"Copeland alpha must be in [0, 1], not {alpha}.")
        else:
            alpha = None
        self.family = family
        r"""Rule family."""
        self.m = m
        r"""Number of alternatives."""
        self.scores = scores
        r"""Scoring vector or ``None``."""
        self.alpha = alpha
        r"""Copeland tie points or ``None``."""

    def __eq__(self, other) -> bool:  # noqa: D105
        return repr(self) == repr(other)

    def __hash__(self) -> int:  # noqa: D105
        return hash(repr(self))

    def __repr__(self):  # noqa: D105
        extra = ""
        if self.scores is not None:
            extra = f", scores={self.scores}"
        if self.alpha is not None:
            extra = f", alpha='{self.alpha}'"
        return f"VotingRule('{self.family}', {self.m}{extra})"

    @property
    def is_scoring(self) -> bool:
        r"""``True`` for positional scoring rules."""
        return self.family == "scoring"

    @property
    def is_veto(self) -> bool:
        r"""``True`` for scoring vectors of the form :math:`(1, \dots, 1, 0)`."""
        return self.is_scoring and self.scores == (1,) * (self.m - 1) + (0,)

    @property
    def name(self) -> str:
        r"""Short name used in file names and CSV rows."""
        if self.is_scoring:
            for name in ("plurality", "borda", "veto"):
                if self.rule_registry[name](self.m) == self:
                    return name
            return "scoring-" + "-".join(str(s) for s in self.scores)
        if self.family == "copeland":
            return f"copeland-{self.alpha}"
        return self.family

    def to_dict(self) -> dict:
        r"""Serialize rule.

        Examples:
            >>> VotingRule.plurality(3).to_dict()
            {'family': 'scoring', 'm': 3, 'scores': [1, 0, 0]}

        """
        data = {"family": self.family, "m": self.m}
        if self.scores is not None:
            data["scores"] = list(self.scores)
        if self.alpha is not None:
            data["alpha"] = str(self.alpha)
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "VotingRule":
        r"""Inverse of :meth:`to_dict`."""
        return cls(
            data["family"],
            data["m"],
            scores=data.get("scores"),
            alpha=data.get("alpha"),
        )

    @classmethod
    def scoring(cls, scores: Sequence[int]) -> "VotingRule":
        r"""Positional scoring rule."""
        return cls("scoring", len(scores), scores=scores)

    @classmethod
    def plurality(cls, m: int) -> "VotingRule":
        r"""Plurality, scoring vector :math:`(1, 0, \dots, 0)`."""
        return cls.scoring((1,) + (0,) * (m - 1))

    @classmethod
    def borda(cls, m: int) -> "VotingRule":
        r"""Borda, scoring vector :math:`(m - 1, m - 2, \dots, 0)`."""
        return cls.scoring(tuple(range(m - 1, -1, -1)))

    @classmethod
    def veto(cls, m: int) -> "VotingRule":
        r"""Veto, scoring vector :math:`(1, \dots, 1, 0)`."""
        return cls.scoring((1,) * (m - 1) + (0,))

    @classmethod
    def copeland(cls, m: int, alpha: Fraction | str = Fraction(1, 2)) -> "VotingRule":
        r"""Copeland with ``alpha`` points per tie."""
        return cls("copeland", m, alpha=alpha)

    @classmethod
    def biased_copeland(cls, m: int) -> "VotingRule":
        r"""Copeland without tie points, beating 2 earns alternative 1 two points."""
        return cls("biased-copeland", m)

    @classmethod
    def maximin(cls, m: int) -> "VotingRule":
        r"""Maximin."""
        return cls("maximin", m)

    @classmethod
    def ranked_pairs(cls, m: int) -> "VotingRule":
        r"""Ranked pairs."""
        return cls("ranked-pairs", m)

    @classmethod
    def schulze(cls, m: int) -> "VotingRule":
        r"""Schulze."""
        return cls("schulze", m)

    @classmethod
    def stv(cls, m: int) -> "VotingRule":
        r"""Single transferable vote."""
        return cls("stv", m)

    @classmethod
    def plurality_runoff(cls, m: int) -> "VotingRule":
        r"""Plurality with runoff."""
        return cls("plurality-runoff", m)

    rule_registry: dict[str, Callable[..., "VotingRule"]] = {}
    r"""Rule registry.

    Holds mapping between registered rule names
    and constructors taking the number of alternatives.

    """

    @classmethod
    def register(
        cls,
        name: str,
        constructor: Callable[..., "VotingRule"],
    ):
        r"""Register rule constructor.

        Args:
            name: name of the rule, e.g. ``"borda"``
            constructor: callable returning a rule
                for a given number of alternatives

        Examples:
            >>> VotingRule.register("antiplurality", VotingRule.veto)
            >>> VotingRule.from_name("antiplurality", 3)
            VotingRule('scoring', 3, scores=(1, 1, 0))

        """
        cls.rule_registry[name] = constructor

    @classmethod
    def from_name(
        cls,
        name: str,
        m: int,
        **kwargs,
    ) -> "VotingRule":
        r"""Create registered rule.

        Args:
            name: registered rule name
            m: number of alternatives
            kwargs: passed on to the constructor,
                e.g. ``alpha`` for Copeland

        Raises:
            ValueError: if ``name`` is not registered

        Examples:
            >>> VotingRule.from_name("copeland", 3, alpha="1/2")
            VotingRule('copeland', 3, alpha='1/2')

        """
        if name not in cls.rule_registry:
            raise ValueError(
                f"'{name}' is not a registered rule, "
                f"expected one of {sorted(cls.rule_registry)}."
            )
        return cls.rule_registry[name](m, **kwargs)


for _name, _constructor in {
    "plurality": VotingRule.plurality,
    "borda": VotingRule.borda,
    "veto": VotingRule.veto,
    "copeland": VotingRule.copeland,
    "biased-copeland": VotingRule.biased_copeland,
    "maximin": VotingRule.maximin,
    "ranked-pairs": VotingRule.ranked_pairs,
    "schulze": VotingRule.schulze,
    "stv": VotingRule.stv,
    "plurality-runoff": VotingRule.plurality_runoff,
}.items():
    VotingRule.register(_name, _constructor)


def _best(values: Sequence) -> int:
    r"""Alternative with the largest value, smallest index among ties."""
    best = max(values)
    return values.index(best) + 1


def scoring_scores(scores: Sequence[int], hist: Sequence) -> list:
    r"""Total score of every alternative, alternative ``a`` at ``[a - 1]``."""
    m = len(scores)
    totals = [0] * m
    for pos, count in zip(_positions(m), hist):
        if count:
            for a in range(m):
                totals[a] += count * scores[pos[a]]
    return totals


def copeland_scores(
    hist: Sequence,
    alpha: Fraction,
    *,
    biased: bool = False,
) -> list[Fraction]:
    r"""Copeland score of every alternative, alternative ``a`` at ``[a - 1]``."""
    w = wmg(hist)
    m = len(w)
    totals = [Fraction(0)] * m
    for a in range(m):
        for b in range(m):
            if a == b:
                continue
            if w[a][b] > 0:
                totals[a] += 2 if biased and (a, b) == (0, 1) else 1
            elif w[a][b] == 0:
                totals[a] += alpha
    return totals


def schulze_strengths(hist: Sequence) -> list[list[Fraction]]:
    r"""Strongest path strengths, ``[a - 1][b - 1]`` for paths from ``a`` to ``b``.

    Only edges of positive weight form paths,
    missing paths have strength 0.

    """
    w = wmg(hist)
    m = len(w)
    p = [
        [w[a][b] if a != b and w[a][b] > 0 else Fraction(0) for b in range(m)]
        for a in range(m)
    ]
    for k in range(m):
        for a in range(m):
            if a == k:
                continue
            for b in range(m):
                if b in (a, k):
                    continue
                p[a][b] = max(p[a][b], min(p[a][k], p[k][b]))
    return p


def _reaches(edges: dict[int, set[int]], start: int, goal: int) -> bool:
    stack = [start]
    seen = set()
    while stack:
        node = stack.pop()
        if node == goal:
            return True
        if node in seen:
            continue
        seen.add(node)
        stack.extend(edges[node])
    return False


def _ranked_pairs(hist: Sequence) -> int:
    w = wmg(hist)
    m = len(w)
    candidates = sorted(
        ((a, b) for a in range(m) for b in range(m) if a != b and w[a][b] > 0),
        key=lambda edge: (-w[edge[0]][edge[1]], edge),
    )
    locked = {a: set() for a in range(m)}
    for a, b in candidates:
        if not _reaches(locked, b, a):
            locked[a].add(b)
    beaten = {b for targets in locked.values() for b in targets}
    return min(a for a in range(m) if a not in beaten) + 1


def _plurality_remaining(
    hist: Sequence,
    m: int,
    remaining: list[int],
) -> dict[int, int]:
    totals = {a: 0 for a in remaining}
    removed = set(range(1, m + 1)) - set(remaining)
    for ranking, count in zip(rankings(m), hist):
        if count:
            totals[_top(ranking, removed)] += count
    return totals


def _stv(hist: Sequence, m: int) -> int:
    remaining = list(range(1, m + 1))
    while len(remaining) > 1:
        totals = _plurality_remaining(hist, m, remaining)
        lowest = min(totals.values())
        loser = max(a for a in remaining if totals[a] == lowest)
        remaining.remove(loser)
    return remaining[0]


def _plurality_runoff(hist: Sequence, m: int) -> int:
    totals = scoring_scores((1,) + (0,) * (m - 1), hist)
    order = sorted(range(1, m + 1), key=lambda a: (-totals[a - 1], a))
    a, b = sorted(order[:2])
    w = wmg(hist)
    return b if w[a - 1][b - 1] < 0 else a


def winner(rule: VotingRule, hist: Sequence) -> int:
    r"""Winner under lexicographic tie-breaking.

    Co-winners are resolved in favor of the smallest index.
    Fractional histograms are accepted.

    Args:
        rule: voting rule
        hist: histogram over rankings in canonical order

    Returns:
        winning alternative

    Raises:
        ValueError: if the histogram is negative, empty,
            or does not match the number of alternatives of ``rule``

    Examples:
        >>> profile = Profile([(1, 2, 3), (2, 1, 3), (3, 2, 1)])
        >>> winner(VotingRule.plurality(3), profile.histogram())
        1
        >>> winner(VotingRule.borda(3), profile.histogram())
        2

    """
    m = rule.m
    if len(hist) != math.factorial(m):
        raise ValueError(
            f"Histogram has {len(hist)} entries, expected {math.factorial(m)}."
        )
    if any(count < 0 for count in hist):
        raise ValueError("Histogram entries must be non-negative.")
    if not sum(hist) > 0:
        raise ValueError("Cannot determine the winner of an empty histogram.")
    family = rule.family
    if family == "scoring":
        return _best(scoring_scores(rule.scores, hist))
    if family == "copeland":
        return _best(copeland_scores(hist, rule.alpha))
    if family == "biased-copeland":
        return _best(copeland_scores(hist, Fraction(0), biased=True))
    if family == "maximin":
        w = wmg(hist)
        return _best([min(w[a][b] for b in range(m) if b != a) for a in range(m)])
    if family == "schulze":
        p = schulze_strengths(hist)
        return next(
            a + 1
            for a in range(m)
            if all(p[a][b] >= p[b][a] for b in range(m) if b != a)
        )
    if family == "ranked-pairs":
        return _ranked_pairs(hist)
    if family == "stv":
        return _stv(hist, m)
    return _plurality_runoff(hist, m)


def loser(rule: VotingRule, hist: Sequence) -> int:
    r"""Last alternative of the lexicographic score order.

    Among alternatives with the lowest total score
    the one with the largest index loses.

    Raises:
        ValueError: if ``rule`` is not a positional scoring rule

    Examples:
        >>> loser(VotingRule.borda(3), Profile([(1, 2, 3)]).histogram())
        3

    """
    if not rule.is_scoring:
        raise ValueError(f"Loser is only defined for scoring rules, not {rule}.")
    totals = scoring_scores(rule.scores, hist)
    lowest = min(totals)
    return max(a + 1 for a, total in enumerate(totals) if total == lowest)
