"""Command-line frontend: trace walks, run searches, sweep experiments,
verify the exact oracles, and fit scaling slopes.

All output is deterministic for a fixed --seed: numbers are formatted
with '.' decimals and fixed significant digits, rows are sorted, and
worker count never changes results.  Exit codes: 0 success, 1 bad
configuration, 2 verification failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from . import experiments, oracles
from .engine import LevyWalk
from .powerlaw import DomainError, make_law
from .search import (ConfigError, FixedAlpha, OptimalAlpha, SearchConfig,
                     UniformRandomAlpha, default_threads, make_rng, run_parallel)

_TAG_WALK_CLI = 0x77A1


class CliError(Exception):
    """Configuration problem; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(message)


def _load_config(path: str) -> dict:
    if path.endswith(".toml"):
        try:
            import tomllib
        except ModuleNotFoundError:
            import tomli as tomllib
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    with open(path) as fh:
        return json.load(fh)


def _apply_config(args: argparse.Namespace, parser: argparse.ArgumentParser,
                  argv: list[str]) -> argparse.Namespace:
    if not getattr(args, "config", None):
        return args
    data = _load_config(args.config)
    if not isinstance(data, dict):
        raise CliError(f"--config: {args.config} must hold a table of options")
    explicit = {a.lstrip("-").split("=")[0].replace("-", "_")
                for a in argv if a.startswith("--")}
    for key, value in data.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            raise CliError(f"--config: unknown option {key!r}")
        if attr not in explicit:
            setattr(args, attr, value)
    return args


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--seed", type=int, default=0,
                     help="master seed; identical seeds give identical output (default 0)")
    sub.add_argument("--out", default=None, help="output file (default stdout)")
    sub.add_argument("--format", choices=["csv", "json"], default=None)
    sub.add_argument("--threads", type=int, default=None,
                     help="worker pool size (default: LEVY_THREADS or 1)")
    sub.add_argument("--config", default=None,
                     help="JSON or TOML file of options; explicit flags win")


def build_parser() -> _Parser:
    parser = _Parser(prog="levysearch", description=__doc__)
    subs = parser.add_subparsers(dest="command", required=True)

    walk = subs.add_parser("walk", help="dump one walk trajectory as CSV")
    walk.add_argument("--alpha", type=float, default=None)
    walk.add_argument("--steps", type=int, default=None)
    walk.add_argument("--cap", type=int, default=None)
    walk.add_argument("--path-mode", choices=["uniform", "arbitrary"], default="uniform",
                      help="tie rule on direct paths; 'arbitrary' picks a fixed branch")
    _add_common(walk)

    search = subs.add_parser("search", help="parallel k-walker search, JSON result")
    search.add_argument("--k", type=int, default=None)
    search.add_argument("--ell", type=int, default=None,
                        help="target distance; places the target due east")
    search.add_argument("--target-x", type=int, default=None)
    search.add_argument("--target-y", type=int, default=None)
    search.add_argument("--budget", type=int, default=None)
    search.add_argument("--strategy", choices=["fixed", "optimal", "uniform"],
                        default="fixed")
    search.add_argument("--alpha", type=float, default=None,
                        help="exponent for --strategy fixed")
    search.add_argument("--coeff", type=float, default=5.0,
                        help="loglog correction coefficient for --strategy optimal")
    _add_common(search)

    sweep = subs.add_parser("sweep", help="Monte Carlo grid sweep, CSV rows")
    sweep.add_argument("--alphas", default=None, help="comma-separated exponents")
    sweep.add_argument("--ells", default=None, help="comma-separated distances")
    sweep.add_argument("--ks", default="1")
    sweep.add_argument("--budgets", default=None,
                       help="comma-separated budgets; default scales with the regime")
    sweep.add_argument("--budget-constant", type=float, default=10.0)
    sweep.add_argument("--trials", type=int, default=None)
    sweep.add_argument("--strategy", choices=["fixed", "uniform"], default="fixed",
                       help="'uniform' draws each walker's exponent from (2,3) "
                            "instead of the cell alpha")
    sweep.add_argument("--summary", default=None,
                       help="also write a JSON summary (p_hat, CI, fits)")
    _add_common(sweep)

    verify = subs.add_parser("verify", help="run exact-oracle suites; exit 2 on violation")
    verify.add_argument("--suite", default="all",
                        help=f"comma list from {sorted(oracles.SUITES)} or 'all'")
    verify.add_argument("--dmax", type=int, default=12,
                        help="distance bound for the path-law suite")
    verify.add_argument("--dump-lemma1", default=None, metavar="CSV",
                        help="audit dump of the exact layer-node law "
                             "(columns d,i,w_x,w_y,p_num,p_den)")
    _add_common(verify)

    fit = subs.add_parser("fit", help="log-log slope of (x, y) columns in a CSV")
    fit.add_argument("--infile", required=True)
    fit.add_argument("--xcol", default="ell")
    fit.add_argument("--ycol", default="p_hat")
    _add_common(fit)

    return parser


def _open_out(args):
    if args.out:
        return open(args.out, "w", newline="")
    return None


def _emit(args, text: str) -> None:
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _require(args, *names) -> None:
    for name in names:
        if getattr(args, name) is None:
            raise CliError(f"--{name.replace('_', '-')} is required "
                           f"(flag or config file)")


def _cmd_walk(args) -> int:
    _require(args, "alpha", "steps")
    law = make_law(args.alpha, cap=args.cap)
    rng = make_rng(args.seed, _TAG_WALK_CLI)
    tie_rule = "low" if args.path_mode == "arbitrary" else "random"
    walk = LevyWalk(law, rng, tie_rule=tie_rule)
    rows = [[0, 0, 0, 0]]
    for step in range(1, args.steps + 1):
        x, y = walk.step()
        rows.append([step, x, y, walk.phase_id])
    if args.format == "json":
        _emit(args, json.dumps({"columns": ["step", "x", "y", "phase_id"],
                                "rows": rows}, sort_keys=True) + "\n")
        return 0
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["step", "x", "y", "phase_id"])
    writer.writerows(rows)
    _emit(args, buf.getvalue())
    return 0


def _resolve_target(args) -> tuple[int, int]:
    has_xy = args.target_x is not None or args.target_y is not None
    if args.ell is not None:
        if has_xy:
            print("warning: --ell overrides --target-x/--target-y", file=sys.stderr)
        if args.ell < 0:
            raise CliError("--ell must be >= 0")
        return (args.ell, 0)
    if args.target_x is None or args.target_y is None:
        raise CliError("need --ell or both --target-x and --target-y")
    return (args.target_x, args.target_y)


def _json_only(args) -> None:
    if args.format == "csv":
        raise CliError("--format: this subcommand emits json")


def _cmd_search(args) -> int:
    _require(args, "k", "budget")
    _json_only(args)
    target = _resolve_target(args)
    if args.strategy == "fixed":
        if args.alpha is None:
            raise CliError("--strategy fixed needs --alpha")
        strategy = FixedAlpha(args.alpha)
        strategy_desc = {"variant": "fixed", "alpha": args.alpha}
    elif args.strategy == "optimal":
        strategy = OptimalAlpha(coeff=args.coeff)
        strategy_desc = {"variant": "optimal", "coeff": args.coeff}
    else:
        strategy = UniformRandomAlpha()
        strategy_desc = {"variant": "uniform", "lo": 2.0, "hi": 3.0}
    threads = args.threads if args.threads is not None else default_threads()
    try:
        config = SearchConfig(k=args.k, target=target, budget=args.budget,
                              master_seed=args.seed, strategy=strategy,
                              threads=threads)
    except ConfigError as exc:
        raise CliError(str(exc)) from exc
    outcome = run_parallel(config)
    result = {"hit_step": outcome.hit_step, "winner": outcome.winner,
              "k": args.k, "strategy": strategy_desc, "seed": args.seed}
    _emit(args, json.dumps(result, sort_keys=True) + "\n")
    return 0


def _parse_list(value, kind, flag: str):
    # config files may hold native lists; flags hold comma-joined strings
    try:
        if isinstance(value, (list, tuple)):
            return tuple(kind(part) for part in value)
        return tuple(kind(part) for part in str(value).split(","))
    except (TypeError, ValueError) as exc:
        raise CliError(f"{flag}: expected comma-separated {kind.__name__} values") from exc


def _cmd_sweep(args) -> int:
    _require(args, "alphas", "ells", "trials")
    grid = experiments.SweepGrid(
        alphas=_parse_list(args.alphas, float, "--alphas"),
        ells=_parse_list(args.ells, int, "--ells"),
        ks=_parse_list(args.ks, int, "--ks"),
        budgets=_parse_list(args.budgets, int, "--budgets") if args.budgets else (),
        budget_constant=args.budget_constant,
    )
    threads = args.threads if args.threads is not None else default_threads()
    strategy = UniformRandomAlpha() if args.strategy == "uniform" else None
    rows = experiments.sweep(grid, trials=args.trials, seed=args.seed,
                             strategy=strategy, threads=threads)
    if args.format == "json":
        _emit(args, experiments.rows_to_json_summary(rows) + "\n")
    else:
        buf = io.StringIO()
        experiments.write_rows_csv(buf, rows)
        _emit(args, buf.getvalue())
    if args.summary:
        with open(args.summary, "w") as fh:
            fh.write(experiments.rows_to_json_summary(rows) + "\n")
    return 0


def _cmd_verify(args) -> int:
    _json_only(args)
    suites = None if args.suite == "all" else [s.strip() for s in args.suite.split(",")]
    try:
        report = oracles.run_verification(suites, lemma1={"d_max": args.dmax})
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    if args.dump_lemma1:
        from .lattice import dump_intermediate_csv
        dump_intermediate_csv(args.dump_lemma1, args.dmax)
    _emit(args, report.to_json() + "\n")
    return 0 if report.passed else 2


def _cmd_fit(args) -> int:
    _json_only(args)
    with open(args.infile, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or args.xcol not in reader.fieldnames \
                or args.ycol not in reader.fieldnames:
            raise CliError(f"--xcol/--ycol: {args.infile} lacks "
                           f"{args.xcol!r}/{args.ycol!r} columns")
        pts = [(float(row[args.xcol]), float(row[args.ycol])) for row in reader]
    try:
        fit = experiments.fit_power_law(pts)
    except experiments.FitDomainError as exc:
        raise CliError(str(exc)) from exc
    _emit(args, json.dumps({"slope": fit.slope, "intercept": fit.intercept,
                            "r2": fit.r2}, sort_keys=True) + "\n")
    return 0


_COMMANDS = {
    "walk": _cmd_walk,
    "search": _cmd_search,
    "sweep": _cmd_sweep,
    "verify": _cmd_verify,
    "fit": _cmd_fit,
}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args = _apply_config(args, parser, argv)
        return _COMMANDS[args.command](args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (DomainError, ConfigError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
