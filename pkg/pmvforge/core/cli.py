import argparse
from collections.abc import Sequence
import json
import sys

import filelock

import audeer

from pmvforge.core import define
from pmvforge.core import utils
from pmvforge.core.arith import format_fraction
from pmvforge.core.arith import to_fraction
from pmvforge.core.classify import classify_multi
from pmvforge.core.classify import classify_psi
from pmvforge.core.classify import classify_single
from pmvforge.core.elections import Distribution
from pmvforge.core.elections import VotingRule
from pmvforge.core.elections import num_alternatives
from pmvforge.core.elections import parse_profile
from pmvforge.core.elections import uniform_distribution
from pmvforge.core.lp import SearchExhaustedError
from pmvforge.core.montecarlo import EstimateResult
from pmvforge.core.montecarlo import adversary_predicate
from pmvforge.core.montecarlo import estimate
from pmvforge.core.montecarlo import fit_slope
from pmvforge.core.montecarlo import membership_predicate
from pmvforge.core.montecarlo import oracle_predicate
from pmvforge.core.montecarlo import read_scan
from pmvforge.core.montecarlo import round_mixture
from pmvforge.core.montecarlo import scan
from pmvforge.core.montecarlo import sup_estimate
from pmvforge.core.montecarlo import write_scan
from pmvforge.core.oracles import CapExceededError
from pmvforge.core.oracles import InfluenceQuery
from pmvforge.core.settings import PriceTable
from pmvforge.core.settings import SettingFamily
from pmvforge.core.settings import build_family
from pmvforge.core.settings import toy_family


_DEFAULT_M = 3

_DEFAULTS = {
    "parity": define.ODD,
    "b": "1",
    "psi": "0",
    "trials": 10_000,
    "seed": 0,
    "mode": define.SUP,
    "predicate": "membership",
    "axis": "n",
}


class _Parser(argparse.ArgumentParser):
    r"""Parser exiting with :data:`define.EXIT_ERROR` on usage errors.

    Exit code 2 is reserved for undetermined results.

    """

    def error(self, message: str):  # noqa: D102
        self.print_usage(sys.stderr)
        self.exit(define.EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="pmvforge",
        description="Likelihood of coalitional influence in random elections.",
    )
    parser.add_argument(
        "--config",
        help="YAML or JSON file with default values of flags",
    )
    parser.add_argument(
        "--verbose",
        action="store_true",
        help="show progress bars",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    build = commands.add_parser("build", help="build a setting family")
    build.add_argument("problem", choices=define.PROBLEMS)
    build.add_argument("rule", help="registered rule name, e.g. borda")
    build.add_argument("--m", type=int, help="number of alternatives")
    build.add_argument("--d", type=int, help="distinguished alternative")
    build.add_argument("--alpha", help="Copeland tie score, e.g. 1/2")
    build.add_argument("--parity", choices=[define.ODD, define.EVEN])
    build.add_argument("--prices", help="YAML or JSON file with bribery prices")
    build.add_argument("--out", help="JSON file of the family")

    classify = commands.add_parser("classify", help="classify a setting family")
    _add_family_arguments(classify)
    classify.add_argument("--n", help="number of voters")
    classify.add_argument("--b", help="budget")
    classify.add_argument("--psi", help="fraction moved by the data adversary")
    classify.add_argument("--mode", choices=[define.SUP, define.INF])
    classify.add_argument("--knife-band", help="relative width of the knife band")
    classify.add_argument("--out", help="JSON file of the result")

    for name, description in [
        ("estimate", "estimate an instability probability"),
        ("scan", "estimate on a grid of voters and budgets"),
    ]:
        sub = commands.add_parser(name, help=description)
        _add_family_arguments(sub)
        sub.add_argument("--n", help="number of voters, comma separated for scan")
        sub.add_argument("--b", help="budget, comma separated for scan")
        sub.add_argument("--psi", help="fraction moved by the data adversary")
        sub.add_argument("--trials", type=int, help="trials per estimate")
        sub.add_argument("--seed", type=int, help="random seed")
        sub.add_argument(
            "--predicate",
            choices=["membership", "oracle"],
            help="decide instability by family membership or by oracle",
        )
        sub.add_argument("--caps", help="oracle caps, e.g. n=12,m=4,b=6")
        sub.add_argument("--out", help="CSV file of the estimates")

    oracle = commands.add_parser("oracle", help="run a brute-force oracle")
    oracle.add_argument("problem", choices=define.PROBLEMS)
    oracle.add_argument("rule", help="registered rule name, e.g. plurality")
    oracle.add_argument("profile", help="profile text file")
    oracle.add_argument("--m", type=int, help="number of alternatives")
    oracle.add_argument("--alpha", help="Copeland tie score, e.g. 1/2")
    oracle.add_argument("--b", help="budget")
    oracle.add_argument("--d", type=int, help="distinguished alternative")
    oracle.add_argument("--prices", help="YAML or JSON file with bribery prices")
    oracle.add_argument("--caps", help="oracle caps, e.g. n=12,m=4,b=6")
    oracle.add_argument("--out", help="JSON file of the answer")

    fit = commands.add_parser("fit", help="fit a log-log slope to a scan file")
    fit.add_argument("csv", help="scan file")
    fit.add_argument("--axis", choices=["n", "B"])
    fit.add_argument("--floor", type=int, help="minimum number of successes")
    fit.add_argument("--out", help="JSON file of the fit")

    return parser


def _add_family_arguments(parser: argparse.ArgumentParser):
    parser.add_argument("family", help="family JSON file or 'toy'")
    parser.add_argument(
        "--pi",
        help="YAML or JSON list of distributions, by default uniform",
    )


def _apply_config(args: argparse.Namespace):
    r"""Fill flags missing on the command line."""
    defaults = dict(_DEFAULTS)
    if args.config is not None:
        content = utils.read_file(audeer.path(args.config))
        if not isinstance(content, dict):
            raise ValueError(f"Config file '{args.config}' must hold a mapping.")
        defaults.update({key.replace("-", "_"): v for key, v in content.items()})
    for key, value in defaults.items():
        if getattr(args, key, "") is None:
            setattr(args, key, value)
    if getattr(args, "n", "") is None:
        raise ValueError(f"'{args.command}' needs the number of voters --n.")


def _load_family(value: str) -> SettingFamily:
    if value == define.TOY_NAME:
        return toy_family()
    return SettingFamily.from_dict(utils.read_file(audeer.path(value)))


def _load_pi(path: str | None, q: int) -> list[Distribution]:
    if path is None:
        return [uniform_distribution(num_alternatives(q))]
    content = utils.read_file(audeer.path(path))
    return [Distribution.from_values(values) for values in content]


def _load_prices(path: str | None) -> PriceTable | None:
    if path is None:
        return None
    return PriceTable.from_dict(utils.read_file(audeer.path(path)))


def _load_rule(args: argparse.Namespace) -> VotingRule:
    kwargs = {}
    if args.alpha is not None:
        kwargs["alpha"] = str(args.alpha)
    m = _DEFAULT_M if args.m is None else int(args.m)
    return VotingRule.from_name(args.rule, m, **kwargs)


def _parse_caps(value: str | dict | None) -> dict | None:
    r"""Parse caps like ``n=12,m=4``.

    Examples:
        >>> _parse_caps("n=12, b=6")
        {'n': 12, 'b': 6}

    """
    if value is None or isinstance(value, dict):
        return value
    caps = {}
    for item in utils.parse_list(value):
        key, _, number = item.partition("=")
        if not number:
            raise ValueError(f"Invalid cap '{item}', expected e.g. 'n=12'.")
        caps[key.strip()] = int(number)
    return caps


def _emit(obj: object, out: str | None):
    if out is None:
        print(json.dumps(obj, indent=2))
    else:
        utils.write_file(out, obj)


def _cmd_build(args: argparse.Namespace) -> int:
    family = build_family(
        args.problem,
        _load_rule(args),
        d=args.d,
        prices=_load_prices(args.prices),
        parity=args.parity,
    )
    for setting in family:
        print(
            f"{setting.name}: "
            f"{len(setting.source.b)} source rows, "
            f"{len(setting.target.b)} target rows, "
            f"{len(setting.ops)} operations"
        )
    _emit(family.to_dict(), args.out)
    return define.EXIT_SUCCESS


def _cmd_classify(args: argparse.Namespace) -> int:
    family = _load_family(args.family)
    pi = _load_pi(args.pi, family.q)
    n = int(args.n)
    psi = to_fraction(str(args.psi))
    if psi > 0:
        result = classify_psi(family, pi, psi, n, str(args.b))
    elif len(family) == 1:
        result = classify_single(
            family.settings[0],
            pi,
            n,
            family.scaled_budget(str(args.b)),
            args.mode,
            knife_band=args.knife_band,
            verbose=args.verbose,
        )
    else:
        result = classify_multi(
            family,
            pi,
            n,
            str(args.b),
            args.mode,
            verbose=args.verbose,
        )
    _emit(result.to_dict(), args.out)
    if result.is_undetermined:
        return define.EXIT_UNDETERMINED
    return define.EXIT_SUCCESS


def _predicate_factory(args: argparse.Namespace, family: SettingFamily):
    psi = to_fraction(str(args.psi))
    if args.predicate == "oracle":
        if family.rule is None:
            raise ValueError(f"Family '{args.family}' has no rule to run oracles.")
        caps = _parse_caps(args.caps)
        return lambda budget: oracle_predicate(
            family.problem,
            family.rule,
            budget,
            d=family.d,
            prices=family.prices,
            caps=caps,
        )
    if psi > 0:
        return lambda budget: adversary_predicate(family, budget, psi)
    return lambda budget: membership_predicate(family, budget)


def _labels(family: SettingFamily, args: argparse.Namespace) -> dict:
    return {
        "psi": to_fraction(str(args.psi)),
        "setting": args.family,
        "problem": family.problem,
        "rule": "" if family.rule is None else family.rule.name,
    }


def _print_rows(results: Sequence[EstimateResult]):
    print(",".join(define.CSV_COLUMNS))
    for result in results:
        row = result.to_row()
        print(",".join(str(row[column]) for column in define.CSV_COLUMNS))


def _cmd_estimate(args: argparse.Namespace) -> int:
    family = _load_family(args.family)
    pi = _load_pi(args.pi, family.q)
    n = int(args.n)
    budget = to_fraction(str(args.b))
    predicate = _predicate_factory(args, family)(budget)
    kwargs = dict(budget=budget, verbose=args.verbose, **_labels(family, args))
    if len(pi) == 1:
        result = estimate(
            predicate, round_mixture([1], n), pi, args.trials, args.seed, **kwargs
        )
    else:
        result = sup_estimate(
            predicate, family, pi, n, args.trials, args.seed, **kwargs
        )
    if args.out is None:
        _print_rows([result])
    else:
        write_scan(args.out, [result])
    return define.EXIT_SUCCESS


def _cmd_scan(args: argparse.Namespace) -> int:
    family = _load_family(args.family)
    pi = _load_pi(args.pi, family.q)
    if len(pi) != 1:
        raise ValueError("Scans need a single distribution.")
    results = scan(
        _predicate_factory(args, family),
        lambda n: round_mixture([1], n),
        pi,
        utils.parse_list(str(args.n), int),
        utils.parse_list(str(args.b), to_fraction),
        args.trials,
        args.seed,
        out=args.out,
        verbose=args.verbose,
        **_labels(family, args),
    )
    if args.out is None:
        _print_rows(results)
    return define.EXIT_SUCCESS


def _cmd_oracle(args: argparse.Namespace) -> int:
    with open(audeer.path(args.profile)) as fp:
        profile = parse_profile(fp.read(), args.m)
    args.m = profile.m
    query = InfluenceQuery(
        args.problem,
        _load_rule(args),
        profile,
        to_fraction(str(args.b)),
        args.d,
        _load_prices(args.prices),
    )
    answer = query.run(caps=_parse_caps(args.caps))
    obj = {"success": answer.success}
    if answer.witness is not None:
        obj["witness"] = {
            "removed": list(answer.witness["removed"]),
            "added": list(answer.witness["added"]),
            "cost": format_fraction(answer.witness["cost"]),
        }
    _emit(obj, args.out)
    return define.EXIT_SUCCESS


def _cmd_fit(args: argparse.Namespace) -> int:
    fit = fit_slope(read_scan(args.csv), args.axis, floor=args.floor)
    _emit(
        {
            "axis": args.axis,
            "slope": fit.slope,
            "intercept": fit.intercept,
            "stderr": fit.stderr,
            "num_points": fit.num_points,
        },
        args.out,
    )
    return define.EXIT_SUCCESS


_COMMANDS = {
    "build": _cmd_build,
    "classify": _cmd_classify,
    "estimate": _cmd_estimate,
    "scan": _cmd_scan,
    "oracle": _cmd_oracle,
    "fit": _cmd_fit,
}


def main(argv: Sequence[str] | None = None) -> int:
    r"""Run the command line interface.

    Args:
        argv: command line arguments,
            by default :data:`sys.argv`

    Returns:
        exit code,
        ``0`` on success,
        ``2`` if a classification or search stays undetermined
        and ``1`` on errors,
        usage errors included

    """
    args = _parser().parse_args(argv)
    try:
        _apply_config(args)
        return _COMMANDS[args.command](args)
    except SearchExhaustedError as ex:
        print(f"Undetermined: {ex}", file=sys.stderr)
        return define.EXIT_UNDETERMINED
    except (
        CapExceededError,
        FileNotFoundError,
        RuntimeError,
        ValueError,
        filelock.Timeout,
    ) as ex:
        print(f"Error: {ex}", file=sys.stderr)
        return define.EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
