from fractions import Fraction
import os


class config:
    r"""Get/set defaults for the :mod:`pmvforge` module."""

    NODE_LIMIT = 1_000_000
    r"""Maximum number of branch-and-bound nodes per integer program."""

    BIG_M = 1_000_000
    r"""Strict exclusion from a closed cone is tested with margin ``1 / BIG_M``."""

    KNIFE_BAND = Fraction(1, 10)
    r"""Relative width of the undecided band around the budget threshold."""

    PATTERN_LIMIT = 100_000
    r"""Maximum number of LPs solved when enumerating membership patterns."""

    ORACLE_CAPS = {"n": 12, "m": 4, "b": 6}
    r"""Largest profile size, number of alternatives and budget
    accepted by the brute-force oracles."""

    SUCCESS_FLOOR = 25
    r"""Minimum number of successes for a scan point to enter a slope fit."""

    CONFIDENCE = 0.95
    r"""Confidence level of Monte Carlo intervals."""

    PSI_BUDGET_CONSTANT = 1
    r"""Constant :math:`C_1` in the restriction :math:`B \le C_1 \sqrt{n}`
    of the data adversary classification."""

    MULTI_BUDGET_FRACTION = Fraction(1, 2)
    r"""Largest admissible :math:`B / n` in multi-setting classification,
    as a fraction of the smallest positive touch threshold."""

    NUM_WORKERS = 1
    r"""Default number of parallel workers."""


def default_num_workers() -> int:
    r"""Default number of parallel workers.

    It first looks for the environment variable
    ``PMV_FORGE_THREADS``,
    which can be set in bash:

    .. code-block:: bash

        export PMV_FORGE_THREADS=4

    If the environment variable is not set,
    :attr:`config.NUM_WORKERS`
    is returned.

    Returns:
        number of workers

    Raises:
        ValueError: if ``PMV_FORGE_THREADS`` is not a positive integer

    Examples:
        >>> default_num_workers()
        1

    """
    value = os.environ.get("PMV_FORGE_THREADS")
    if not value:
        return config.NUM_WORKERS
    try:
        num_workers = int(value)
    except ValueError:
        num_workers = 0
    if num_workers < 1:
        raise ValueError(
            f"PMV_FORGE_THREADS has to be a positive integer, not '{value}'."
        )
    return num_workers
