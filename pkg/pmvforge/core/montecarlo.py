from collections.abc import Callable
from collections.abc import Sequence
import dataclasses
from fractions import Fraction
import functools
import itertools
import math
import os

import numpy as np
import pandas as pd
import scipy.stats

import audeer

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
from pmvforge.core.elections import Profile
from pmvforge.core.elections import VotingRule
from pmvforge.core.lock import scan_lock
from pmvforge.core.lp import LinearProgram
from pmvforge.core.lp import ilp_feasible
from pmvforge.core.oracles import InfluenceQuery
from pmvforge.core.oracles import membership
from pmvforge.core.polyhedra import ZERO_CONE
from pmvforge.core.polyhedra import build_cone
from pmvforge.core.polyhedra import hull_intersection
from pmvforge.core.polyhedra import points
from pmvforge.core.settings import PmvSetting
from pmvforge.core.settings import PriceTable
from pmvforge.core.settings import SettingFamily


Histogram = tuple[int, ...]
Predicate = Callable[[Histogram], bool]


@dataclasses.dataclass(frozen=True)
class VoterAssignment:
    r"""Distribution of every voter.

    Args:
        indices: per voter the index of its distribution
        alpha: mixture the assignment was rounded from

    Raises:
        ValueError: if an index is negative

    """

    indices: tuple[int, ...]
    alpha: Vector | None = None

    def __post_init__(self):
        indices = tuple(int(i) for i in self.indices)
        if any(i < 0 for i in indices):
            raise ValueError("Distribution indices must be non-negative.")
        object.__setattr__(self, "indices", indices)

    @property
    def n(self) -> int:
        r"""Number of voters."""
        return len(self.indices)

    def counts(self, num_vertices: int) -> tuple[int, ...]:
        r"""Number of voters per distribution.

        Raises:
            ValueError: if an index is not below ``num_vertices``

        """
        result = [0] * num_vertices
        for i in self.indices:
            if i >= num_vertices:
                raise ValueError(
                    f"Distribution index {i} needs at least {i + 1} distributions."
                )
            result[i] += 1
        return tuple(result)


def round_mixture(
    alpha: Sequence,
    n: int,
) -> VoterAssignment:
    r"""Round a mixture of distributions to a voter assignment.

    Distribution ``i`` gets :math:`\lfloor n \alpha_i \rfloor` voters,
    the last distribution gets the remaining voters.

    Args:
        alpha: mixture weights
        n: number of voters

    Returns:
        voter assignment

    Raises:
        ValueError: if ``alpha`` is not a probability vector
            or ``n`` is negative

    Examples:
        >>> round_mixture(["1/3", "1/3", "1/3"], 10).counts(3)
        (3, 3, 4)

    """
    alpha = tuple(to_fraction(a) for a in alpha)
    if not alpha or any(a < 0 for a in alpha) or sum(alpha) != 1:
        raise ValueError(f"{[str(a) for a in alpha]} is not a probability vector.")
    if n < 0:
        raise ValueError(f"Number of voters must be non-negative, not {n}.")
    counts = [math.floor(n * a) for a in alpha[:-1]]
    counts.append(n - sum(counts))
    indices = [i for i, count in enumerate(counts) for _ in range(count)]
    return VoterAssignment(tuple(indices), alpha)


def _cdfs(pi_vertices: Sequence) -> np.ndarray:
    r"""Cumulative distributions with exact breakpoints as floats."""
    rows = []
    for pi in points(pi_vertices):
        rows.append([float(c) for c in itertools.accumulate(pi)])
    return np.array(rows, dtype=float)


def _sample(
    counts: Sequence[int],
    cdfs: np.ndarray,
    rng: np.random.Generator,
) -> Histogram:
    q = cdfs.shape[1]
    hist = np.zeros(q, dtype=int)
    for count, cdf in zip(counts, cdfs):
        if not count:
            continue
        draws = np.searchsorted(cdf, rng.random(count), side="right")
        hist += np.bincount(np.minimum(draws, q - 1), minlength=q)
    return tuple(int(v) for v in hist)


def sample_histogram(
    assign: VoterAssignment,
    pi_vertices: Sequence,
    rng: np.random.Generator,
) -> Histogram:
    r"""Draw the histogram of independent voters.

    Every voter draws a ranking
    by inverting the cumulative distribution
    of its assigned distribution.

    Args:
        assign: voter assignment
        pi_vertices: distributions,
            plain sequences are not validated
        rng: random generator

    Returns:
        histogram summing to the number of voters

    Examples:
        >>> rng = np.random.default_rng(0)
        >>> sample_histogram(round_mixture([1], 4), [[1, 0, 0]], rng)
        (4, 0, 0)

    """
    cdfs = _cdfs(pi_vertices)
    return _sample(assign.counts(len(cdfs)), cdfs, rng)


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    r"""Independent random stream of a single trial.

    Streams depend only on ``seed`` and ``trial``,
    so trials can run in any order.

    """
    return np.random.default_rng(np.random.SeedSequence([seed, trial]))


def wilson_interval(
    successes: int,
    trials: int,
    confidence: float | None = None,
) -> tuple[float, float]:
    r"""Wilson score interval of a binomial proportion.

    Args:
        successes: number of successes
        trials: number of trials
        confidence: confidence level,
            by default :attr:`config.CONFIDENCE`

    Returns:
        lower and upper bound

    Raises:
        ValueError: if ``trials < 1``,
            ``successes`` is not in ``0..trials``
            or ``confidence`` is not in :math:`(0, 1)`

    Examples:
        >>> low, high = wilson_interval(10, 10)
        >>> round(low, 4), high
        (0.7225, 1.0)

    """
    if confidence is None:
        confidence = config.CONFIDENCE
    if trials < 1:
        raise ValueError(f"Number of trials must be positive, not {trials}.")
    if not 0 <= successes <= trials:
        raise ValueError(f"Successes must be in 0..{trials}, not {successes}.")
    if not 0 < confidence < 1:
        raise ValueError(f"Confidence must be in (0, 1), not {confidence}.")
    z = scipy.stats.norm.ppf(1 - (1 - confidence) / 2)
    p = successes / trials
    denominator = 1 + z * z / trials
    center = (p + z * z / (2 * trials)) / denominator
    half = z / denominator * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials**2))
    return min(p, max(0.0, center - half)), max(p, min(1.0, center + half))


@dataclasses.dataclass(frozen=True)
class EstimateResult:
    r"""Monte Carlo estimate of an instability probability.

    Args:
        n: number of voters
        budget: budget
        psi: fraction of votes moved by the data adversary
        trials: number of trials
        successes: number of unstable histograms
        p_hat: relative frequency
        ci_low: lower bound of the Wilson interval
        ci_high: upper bound of the Wilson interval
        seed: random seed
        setting: setting or family name
        problem: problem tag
        rule: rule name

    """

    n: int
    budget: Fraction
    psi: Fraction
    trials: int
    successes: int
    p_hat: float
    ci_low: float
    ci_high: float
    seed: int
    setting: str = ""
    problem: str = ""
    rule: str = ""

    def to_row(self) -> dict:
        r"""Row of a scan file.

        Examples:
            >>> result = EstimateResult(
            ...     4, Fraction(1), Fraction(0), 1, 1, 1.0, 0.5, 1.0, 0
            ... )
            >>> list(result.to_row())[:3]
            ['n', 'B', 'psi']

        """
        return {
            "n": self.n,
            "B": format_fraction(self.budget),
            "psi": format_fraction(self.psi),
            "trials": self.trials,
            "successes": self.successes,
            "p_hat": self.p_hat,
            "ci_low": self.ci_low,
            "ci_high": self.ci_high,
            "seed": self.seed,
            "setting": self.setting,
            "problem": self.problem,
            "rule": self.rule,
        }

    @classmethod
    def from_row(cls, row: dict) -> "EstimateResult":
        r"""Inverse of :meth:`to_row`."""
        return cls(
            int(row["n"]),
            to_fraction(str(row["B"])),
            to_fraction(str(row["psi"])),
            int(row["trials"]),
            int(row["successes"]),
            float(row["p_hat"]),
            float(row["ci_low"]),
            float(row["ci_high"]),
            int(row["seed"]),
            str(row["setting"]),
            str(row["problem"]),
            str(row["rule"]),
        )


_CHUNK_SIZE = 1_000


def _run_chunk(
    predicate: Predicate,
    counts: tuple[int, ...],
    cdfs: np.ndarray,
    seed: int,
    start: int,
    stop: int,
) -> int:
    successes = 0
    for trial in range(start, stop):
        hist = _sample(counts, cdfs, trial_rng(seed, trial))
        try:
            successes += bool(predicate(hist))
        except Exception as ex:
            raise RuntimeError(
                f"Predicate failed in trial {trial} with seed {seed}: {ex}"
            ) from ex
    return successes


def estimate(
    predicate: Predicate,
    assign: VoterAssignment,
    pi_vertices: Sequence,
    trials: int,
    seed: int,
    *,
    budget: Fraction | int | str = 0,
    psi: Fraction | int | str = 0,
    setting: str = "",
    problem: str = "",
    rule: str = "",
    confidence: float | None = None,
    verbose: bool = False,
) -> EstimateResult:
    r"""Estimate the probability that a sampled histogram satisfies a predicate.

    Trials draw from independent streams
    derived from ``seed`` and the trial index
    and run in chunks with :func:`audeer.run_tasks`.

    Args:
        predicate: event on histograms,
            e.g. from :func:`membership_predicate`
        assign: voter assignment
        pi_vertices: distributions
        trials: number of trials
        seed: random seed
        budget: budget reported in the result
        psi: data adversary fraction reported in the result
        setting: setting name reported in the result
        problem: problem tag reported in the result
        rule: rule name reported in the result
        confidence: confidence level of the interval,
            by default :attr:`config.CONFIDENCE`
        verbose: show progress bar

    Returns:
        estimate

    Raises:
        ValueError: if ``trials < 1``
        RuntimeError: if the predicate fails,
            naming trial and seed

    Examples:
        >>> uniform = [[Fraction(1, 2), Fraction(1, 2)]]
        >>> result = estimate(lambda hist: True, round_mixture([1], 10), uniform, 20, 0)
        >>> result.p_hat, result.ci_high
        (1.0, 1.0)

    """
    if trials < 1:
        raise ValueError(f"Number of trials must be positive, not {trials}.")
    cdfs = _cdfs(pi_vertices)
    counts = assign.counts(len(cdfs))
    params = [
        ([predicate, counts, cdfs, seed, start, min(start + _CHUNK_SIZE, trials)], {})
        for start in range(0, trials, _CHUNK_SIZE)
    ]
    successes = sum(
        utils.run_tasks(
            _run_chunk,
            params,
            verbose=verbose,
            task_description="Trials",
        )
    )
    low, high = wilson_interval(successes, trials, confidence)
    return EstimateResult(
        assign.n,
        to_fraction(budget),
        to_fraction(psi),
        trials,
        successes,
        successes / trials,
        low,
        high,
        seed,
        setting,
        problem,
        rule,
    )


def toy_likelihood(
    n: int,
    budget: Fraction | int | str,
    pi: Sequence,
) -> float:
    r"""Exact probability of the unstable set of the built-in toy setting.

    A histogram of ``n`` voters is unstable
    if :math:`0 \le x_2 - x_1 \le 2B - 1`.
    With :math:`x_1` binomially distributed
    the probability is a sum of binomial probabilities.

    Args:
        n: number of voters
        budget: budget
        pi: distribution over the two coordinates

    Returns:
        probability

    Examples:
        >>> round(toy_likelihood(2, 1, ["1/2", "1/2"]), 4)
        0.5

    """
    budget = math.floor(to_fraction(budget))
    p = float(to_fraction(pi[0]))
    low = math.ceil(Fraction(n - 2 * budget + 1, 2))
    high = n // 2
    if low > high:
        return 0.0
    return float(
        scipy.stats.binom.cdf(high, n, p) - scipy.stats.binom.cdf(low - 1, n, p)
    )


def membership_predicate(
    family: SettingFamily,
    budget: Fraction | int | str,
    *,
    node_limit: int | None = None,
) -> Predicate:
    r"""Instability of histograms in a setting family.

    Answers are cached per histogram.

    Examples:
        >>> predicate = membership_predicate(SettingFamily("toy", None, [toy]), 1)
        >>> predicate((5, 5)), predicate((4, 6))
        (True, False)

    """

    @functools.lru_cache(maxsize=None)
    def predicate(hist: Histogram) -> bool:
        return membership(hist, family, budget, node_limit=node_limit)

    return predicate


def oracle_predicate(
    problem: str,
    rule: VotingRule,
    budget: Fraction | int | str,
    *,
    d: int | None = None,
    prices: PriceTable | None = None,
    caps: dict | None = None,
) -> Predicate:
    r"""Success of a brute-force oracle on sampled histograms.

    Answers are cached per histogram.

    """

    @functools.lru_cache(maxsize=None)
    def predicate(hist: Histogram) -> bool:
        query = InfluenceQuery(
            problem,
            rule,
            Profile.from_histogram(hist),
            budget,
            d,
            prices,
        )
        return query.run(caps=caps).success

    return predicate


def _transfers(q: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(q) for j in range(q) if i != j]


def _adversary_program(
    setting: PmvSetting,
    hist: Histogram,
    budget: Fraction,
    moves: int,
) -> LinearProgram:
    r"""Transfers of votes followed by operations within the budget.

    Variables are the transfers :math:`\kappa_{ij}`
    moving votes from ranking ``i`` to ``j``
    followed by the operation counts.

    """
    q = setting.q
    transfers = _transfers(q)
    ops = setting.ops.matrix
    num_ops = len(ops)
    x = tuple(Fraction(v) for v in hist)

    def moved(a: Vector) -> tuple:
        return tuple(a[j] - a[i] for i, j in transfers)

    rows = [((Fraction(1),) * len(transfers) + zeros(num_ops), moves)]
    for k in range(q):
        outflow = tuple(Fraction(int(i == k)) for i, _ in transfers)
        rows.append((outflow + zeros(num_ops), x[k]))
    for a, b in setting.source.rows():
        rows.append((moved(a) + zeros(num_ops), b - dot(a, x)))
    rows.append((zeros(len(transfers)) + tuple(setting.costs), budget))
    for r, coef in setting.ops.outflow():
        rows.append((negate(moved(unit(q, r))) + coef, x[r]))
    for a, b in setting.target.rows():
        rows.append((moved(a) + tuple(dot(a, op) for op in ops), b - dot(a, x)))
    upper = [min(moves, hist[i]) for i, _ in transfers]
    upper += [math.floor(budget / c) for c in setting.costs]
    return LinearProgram(
        len(transfers) + num_ops,
        inequalities=rows,
        lower=(0,) * len(upper),
        upper=upper,
    )


def data_adversary_feasible(
    hist: Sequence[int],
    family: SettingFamily,
    budget: Fraction | int | str,
    psi: Fraction | int | str,
    *,
    node_limit: int | None = None,
) -> bool:
    r"""Whether moving a fraction of the votes makes a histogram unstable.

    The data adversary moves at most :math:`\lfloor \psi n \rfloor` votes
    to other rankings,
    then operations within the budget
    have to reach the target polyhedron of some setting.

    Args:
        hist: integer histogram
        family: setting family
        budget: budget in units of the family prices
        psi: fraction of moved votes in :math:`[0, 1]`
        node_limit: branch-and-bound nodes per integer program

    Returns:
        ``True`` if the modified histogram can be unstable

    Raises:
        ValueError: if ``psi`` is not in :math:`[0, 1]`
        SearchExhaustedError: if an integer program exceeds its node limit

    Examples:
        >>> family = SettingFamily("toy", None, [toy])
        >>> data_adversary_feasible((60, 40), family, 1, "1/10")
        True
        >>> data_adversary_feasible((60, 40), family, 1, 0)
        False

    """
    psi = to_fraction(psi)
    if not 0 <= psi <= 1:
        raise ValueError(f"psi must be in [0, 1], not {psi}.")
    hist = tuple(int(v) for v in hist)
    moves = math.floor(psi * sum(hist))
    if moves == 0:
        return membership(hist, family, budget, node_limit=node_limit)
    scaled = family.scaled_budget(budget)
    for setting in family:
        prog = _adversary_program(setting, hist, scaled, moves)
        found = ilp_feasible(prog, range(prog.num_vars), node_limit=node_limit)
        if found is not None:
            return True
    return False


def adversary_predicate(
    family: SettingFamily,
    budget: Fraction | int | str,
    psi: Fraction | int | str,
    *,
    node_limit: int | None = None,
) -> Predicate:
    r"""Instability of histograms after the data adversary moved votes.

    Answers are cached per histogram.

    """

    @functools.lru_cache(maxsize=None)
    def predicate(hist: Histogram) -> bool:
        return data_adversary_feasible(
            hist, family, budget, psi, node_limit=node_limit
        )

    return predicate


_GRID_STEPS = 8


def adversary_assignments(
    setting: PmvSetting | SettingFamily,
    pi_vertices: Sequence,
    n: int,
) -> list[VoterAssignment]:
    r"""Candidate assignments of the distribution adversary.

    Every setting whose zero cone meets the distribution hull
    contributes its mixture in the intersection,
    rounded to ``n`` voters.
    Without such a mixture
    all mixtures on a grid of step 1/8 are rounded.

    Args:
        setting: setting or setting family
        pi_vertices: distributions
        n: number of voters

    Returns:
        assignments with distinct voter counts

    Examples:
        >>> half = [Fraction(1, 2), Fraction(1, 2)]
        >>> [a.counts(1) for a in adversary_assignments(toy, [half], 6)]
        [(6,)]

    """
    vertices = points(pi_vertices)
    settings = setting if isinstance(setting, SettingFamily) else [setting]
    mixtures = []
    for member in settings:
        alpha = hull_intersection(build_cone(member, ZERO_CONE), vertices)
        if alpha is not None:
            mixtures.append(alpha)
    if not mixtures:
        t = len(vertices)
        mixtures = [
            tuple(Fraction(c, _GRID_STEPS) for c in combination)
            for combination in itertools.product(range(_GRID_STEPS + 1), repeat=t)
            if sum(combination) == _GRID_STEPS
        ]
    result = {}
    for alpha in mixtures:
        assign = round_mixture(alpha, n)
        result.setdefault(assign.counts(len(vertices)), assign)
    return list(result.values())


def sup_estimate(
    predicate: Predicate,
    setting: PmvSetting | SettingFamily,
    pi_vertices: Sequence,
    n: int,
    trials: int,
    seed: int,
    /,
    **kwargs,
) -> EstimateResult:
    r"""Largest estimate over the candidate adversary assignments.

    The result is a lower bound
    on the likelihood under the worst-case distribution adversary.

    Args:
        predicate: event on histograms
        setting: setting or setting family
        pi_vertices: distributions
        n: number of voters
        trials: number of trials per assignment
        seed: random seed
        kwargs: passed on to :func:`estimate`

    Returns:
        estimate with the largest relative frequency

    """
    results = [
        estimate(predicate, assign, pi_vertices, trials, seed, **kwargs)
        for assign in adversary_assignments(setting, pi_vertices, n)
    ]
    return max(results, key=lambda r: r.p_hat)


def _write_rows(path: str, rows: list[dict], *, append: bool):
    frame = pd.DataFrame(rows, columns=define.CSV_COLUMNS)
    exists = os.path.exists(path)
    frame.to_csv(
        path,
        mode="a" if append else "w",
        header=not (append and exists),
        index=False,
    )


def scan(
    predicate_factory: Callable[[Fraction], Predicate],
    assign_factory: Callable[[int], VoterAssignment],
    pi_vertices: Sequence,
    n_values: Sequence[int],
    budgets: Sequence[Fraction | int | str],
    trials: int,
    seed: int,
    *,
    out: str | None = None,
    verbose: bool = False,
    **kwargs,
) -> list[EstimateResult]:
    r"""Estimate on a grid of voter numbers and budgets.

    Every grid point uses the same seed.
    If ``out`` is given,
    rows are appended to the CSV file under a lock
    as soon as a grid point finishes,
    and the file is rewritten sorted by ``n`` and ``B`` at the end.

    Args:
        predicate_factory: predicate for a given budget
        assign_factory: voter assignment for a given number of voters
        pi_vertices: distributions
        n_values: numbers of voters
        budgets: budgets
        trials: number of trials per grid point
        seed: random seed
        out: CSV file
        verbose: show progress bar
        kwargs: passed on to :func:`estimate`

    Returns:
        estimates sorted by ``n`` and ``B``

    Raises:
        ValueError: if a grid is empty
        filelock.Timeout: if the CSV file stays locked

    """
    budgets = [to_fraction(b) for b in budgets]
    if not n_values or not budgets:
        raise ValueError("Scan grids must not be empty.")
    if out is not None:
        out = audeer.path(out)
        with scan_lock(out):
            _write_rows(out, [], append=False)

    def task(n: int, budget: Fraction) -> EstimateResult:
        result = estimate(
            predicate_factory(budget),
            assign_factory(n),
            pi_vertices,
            trials,
            seed,
            budget=budget,
            **kwargs,
        )
        if out is not None:
            with scan_lock(out):
                _write_rows(out, [result.to_row()], append=True)
        return result

    results = utils.run_tasks(
        task,
        [([n, b], {}) for n in n_values for b in budgets],
        verbose=verbose,
        task_description="Scan",
    )
    results = sorted(results, key=lambda r: (r.n, r.budget))
    if out is not None:
        write_scan(out, results)
    return results


def write_scan(path: str, results: Sequence[EstimateResult]):
    r"""Write estimates to a scan file under a lock.

    Raises:
        filelock.Timeout: if the file stays locked

    """
    path = audeer.path(path)
    with scan_lock(path):
        _write_rows(path, [r.to_row() for r in results], append=False)


def read_scan(path: str) -> list[EstimateResult]:
    r"""Read estimates from a scan file.

    Raises:
        FileNotFoundError: if the file does not exist

    """
    path = audeer.path(path)
    if not os.path.exists(path):
        raise FileNotFoundError(path)
    frame = pd.read_csv(
        path,
        dtype={
            "B": str,
            "psi": str,
            "setting": str,
            "problem": str,
            "rule": str,
        },
        keep_default_na=False,
    )
    return [EstimateResult.from_row(row) for row in frame.to_dict("records")]


@dataclasses.dataclass(frozen=True)
class SlopeFit:
    r"""Least-squares line through log-log points."""

    slope: float
    intercept: float
    stderr: float
    num_points: int


def fit_slope(
    records: Sequence[EstimateResult],
    axis: str = "n",
    *,
    floor: int | None = None,
) -> SlopeFit:
    r"""Fit the slope of the log probability over the log of an axis.

    Only estimates with at least
    :attr:`config.SUCCESS_FLOOR` successes are used.

    Args:
        records: estimates
        axis: ``"n"`` or ``"B"``
        floor: smallest usable number of successes,
            by default :attr:`config.SUCCESS_FLOOR`

    Returns:
        slope fit

    Raises:
        ValueError: if ``axis`` is unknown
            or less than three usable points
            with distinct axis values remain

    """
    if axis not in ("n", "B"):
        raise ValueError(f"Unknown axis '{axis}', expected one of ['n', 'B'].")
    if floor is None:
        floor = config.SUCCESS_FLOOR
    usable = []
    for record in records:
        value = record.n if axis == "n" else record.budget
        if record.successes >= floor and record.p_hat > 0 and value > 0:
            usable.append((math.log(value), math.log(record.p_hat)))
    if len({x for x, _ in usable}) < 3:
        raise ValueError(
            f"Slope fit needs at least 3 points with {floor} or more successes "
            f"and distinct values of {axis}, got {len(usable)} points."
        )
    x, y = zip(*usable)
    fit = scipy.stats.linregress(x, y)
    return SlopeFit(
        float(fit.slope),
        float(fit.intercept),
        float(fit.stderr),
        len(usable),
    )
