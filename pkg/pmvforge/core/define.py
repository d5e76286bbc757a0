CHANGE = "change"
r"""Replace one vote by another vote."""

MOTIVATED = "motivated"
r"""Replace a vote preferring the target to the current winner."""

GENERALIZED = "generalized"
r"""Union of vote changes, additions and deletions."""

ADD = "add"
r"""Add one vote."""

DELETE = "delete"
r"""Delete one vote."""

OPERATION_KINDS = (CHANGE, MOTIVATED, GENERALIZED, ADD, DELETE)
r"""Supported kinds of vote operations."""

PROBLEMS = (
    "CM",
    "MoV",
    "CML",
    "CCAV",
    "CCDV",
    "DCAV",
    "DCDV",
    "CB",
    "DB",
    "e-CCAV",
    "e-CCDV",
    "e-DCAV",
    "e-DCDV",
    "e-CB",
    "e-DB",
)
r"""Supported coalitional influence problems."""

CONTROL_PROBLEMS = ("CCAV", "CCDV", "DCAV", "DCDV")
r"""Control by adding or deleting votes."""

BRIBERY_PROBLEMS = ("CB", "DB")
r"""Generalized bribery with anonymous prices."""

SUP = "sup"
r"""Worst case over the distribution adversary."""

INF = "inf"
r"""Best case over the distribution adversary."""

ZERO = "zero"
r"""Unstable set is empty."""

EXPONENTIAL = "exponential"
r"""Likelihood decays exponentially in the number of voters."""

PT_SQRT_N = "pt-sqrt-n"
r"""Phase transition at budgets around the square root of the number of voters."""

PT_LINEAR_N = "pt-linear-n"
r"""Phase transition at budgets linear in the number of voters."""

POLY_EXPONENT = "poly-exponent"
r"""Polynomial likelihood with a fractional exponent."""

CONSTANT = "constant"
r"""Likelihood bounded away from zero."""

UNDETERMINED = "undetermined"
r"""Search budget exhausted or knife-edge budget."""

BELOW_C2 = "below-c2"
r"""Budget clearly below the threshold."""

ABOVE_C3 = "above-c3"
r"""Budget clearly above the threshold."""

KNIFE = "knife"
r"""Budget too close to the threshold to decide."""

TOUCH = "touch"
r"""Smallest budget whose cone touches the distribution hull."""

COVER = "cover"
r"""Smallest budget whose cone contains the distribution hull."""

CSV_COLUMNS = [
    "n",
    "B",
    "psi",
    "trials",
    "successes",
    "p_hat",
    "ci_low",
    "ci_high",
    "seed",
    "setting",
    "problem",
    "rule",
]
r"""Columns of Monte Carlo scan files."""

TOY_NAME = "toy"
r"""Name of the built-in two-coordinate setting."""

EXIT_SUCCESS = 0
r"""Exit code of successful commands."""

EXIT_ERROR = 1
r"""Exit code of failed commands."""

EXIT_UNDETERMINED = 2
r"""Exit code of commands that could not decide."""

OPTIMAL = "optimal"
r"""Linear program attains its optimum."""

UNBOUNDED = "unbounded"
r"""Linear program objective grows without bound."""

INFEASIBLE = "infeasible"
r"""Linear program has no feasible point."""

ODD = "odd"
r"""Odd number of voters, selects Copeland constructions."""

EVEN = "even"
r"""Even number of voters, selects Copeland constructions."""
