"""Command line entry point: ``python -m sbso <command> ...``.

Exit status is 0 on success, 2 on a usage error and 1 when execution fails.
"""

from __future__ import annotations

import argparse
import logging
import sys

from . import harness
from .hybrid import SWEEP_LAMBDAS
from .suite import SUITES, manifest_table
from .vci import DEFAULT_TAU


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _float_list(text):
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _int_list(text):
    values = [_positive_int(v) for v in text.split(",") if v.strip()]
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _budget(text):
    try:
        harness._budget_rule(int(text) if text.isdigit() else text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return int(text) if text.isdigit() else text


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sbso", description="Simplex-BSO benchmark harness")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def experiment_args(p):
        p.add_argument("--suite", default="hedar", choices=sorted(SUITES))
        p.add_argument("--runs", type=_positive_int, default=50)
        p.add_argument("--budget", type=_budget, default=20000,
                       help="evaluations per run, or a per-dimension rule like 10000n")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", required=True)
        p.add_argument("--workers", type=_positive_int, default=None,
                       help=f"worker processes (default: ${harness.WORKERS_ENV} or all cores)")

    run = sub.add_parser("run", help="run solvers over a suite")
    experiment_args(run)
    run.add_argument("--solvers", default="bso,nms,sbso")

    sweep = sub.add_parser("sweep", help="local budget factor sensitivity")
    experiment_args(sweep)
    sweep.add_argument("--lambdas", type=_int_list, default=list(SWEEP_LAMBDAS))

    lc = sub.add_parser("lcurves", help="write L-curve tables from a results directory")
    lc.add_argument("--results", required=True)
    lc.add_argument("--out", required=True)
    lc.add_argument("--problems", default=None, help="comma-separated problem names")
    lc.add_argument("--stride", type=_positive_int, default=1)

    pr = sub.add_parser("profiles", help="write data profiles and comparison reports")
    pr.add_argument("--results", required=True)
    pr.add_argument("--out", required=True)
    pr.add_argument("--tau", type=_float_list, default=[DEFAULT_TAU])

    ls = sub.add_parser("list", help="print a suite manifest")
    ls.add_argument("--suite", default="hedar", choices=sorted(SUITES))
    return parser


def parse_cli(argv=None):
    """Parse ``argv`` into an ``(args, ExperimentConfig or None)`` pair.

    Raises ``SystemExit(2)`` with usage text on bad input.
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    config = None
    try:
        if args.command == "run":
            config = harness.ExperimentConfig(
                suite=args.suite, solvers=args.solvers, runs=args.runs, budget=args.budget,
                base_seed=args.seed, out=args.out, workers=args.workers)
        elif args.command == "sweep":
            config = harness.ExperimentConfig(
                suite=args.suite, solvers=[f"sbso-{lam}" for lam in args.lambdas],
                runs=args.runs, budget=args.budget, base_seed=args.seed, out=args.out,
                workers=args.workers)
    except harness.InvalidConfig as exc:
        parser.error(str(exc))
    return args, config


def main(argv=None) -> int:
    args, config = parse_cli(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if config is not None:
            res = harness.run_experiment(config)
            failed = sum(r["status"] != "ok" for r in res.records)
            print(f"{len(res.records)} runs written to {config.out} ({failed} failed)")
        elif args.command == "lcurves":
            problems = args.problems.split(",") if args.problems else None
            files = harness.emit_lcurves(args.results, args.out, problems, args.stride)
            print(f"{len(files)} L-curve files written to {args.out}")
        elif args.command == "profiles":
            files = harness.emit_profiles(args.results, args.tau, args.out)
            print(f"{len(files)} profile files written to {args.out}")
        elif args.command == "list":
            sys.stdout.write(manifest_table(args.suite))
    except (OSError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
