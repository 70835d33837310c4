"""Command line entry points.

``tempagg run`` executes a benchmark grid; ``tempagg sample-data``
regenerates the bundled synthetic datasets.  The exit code of ``run`` is
0 only when every configuration in the grid succeeded.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from .bench import DEFAULT_DAY_COUNTS, DEFAULT_STEP_COUNTS, RunConfig, run_grid
from .lp import Tolerances
from .sampledata import write_sample_csvs

logger = logging.getLogger(__name__)


def _parse_counts(text: str) -> tuple[int, ...] | None:
    if text == "default":
        return None
    try:
        counts = tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"counts must be 'default' or a comma-separated integer list, got {text!r}"
        ) from None
    if not counts:
        raise argparse.ArgumentTypeError("counts list is empty")
    return counts


def _default_workers() -> int:
    env = os.environ.get("TEMPAGG_WORKERS")
    if env is None:
        return 1
    try:
        workers = int(env)
    except ValueError:
        raise SystemExit(f"TEMPAGG_WORKERS must be an integer, got {env!r}")
    if workers < 1:
        raise SystemExit("TEMPAGG_WORKERS must be at least 1")
    return workers


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tempagg",
        description="Temporal aggregation benchmark for energy system models",
    )
    parser.add_argument(
        "-v", "--verbose", action="store_true", help="log progress to stderr"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a benchmark configuration grid")
    run.add_argument(
        "--model",
        required=True,
        help="'building', 'dispatch', or a path to a scenario JSON file",
    )
    run.add_argument(
        "--mode",
        choices=("days", "steps", "both"),
        default="both",
        help="aggregate to typical days, typical time steps, or both",
    )
    run.add_argument(
        "--counts",
        type=_parse_counts,
        default=None,
        help="comma-separated cluster counts, or 'default' for the built-in grid",
    )
    run.add_argument(
        "--profiles", required=True, type=Path, help="profile CSV to load"
    )
    run.add_argument(
        "--out", required=True, type=Path, help="output directory for reports"
    )
    run.add_argument(
        "--extremes",
        action="store_true",
        help="inject per-attribute extreme candidates after clustering",
    )
    run.add_argument(
        "--workers",
        type=int,
        default=None,
        help="parallel configuration workers (default 1, or TEMPAGG_WORKERS)",
    )
    run.add_argument(
        "--export-lp",
        action="store_true",
        help="write each aggregated model as an .lp text file",
    )
    run.add_argument(
        "--feasibility-tol", type=float, default=1e-7, help="solver feasibility tolerance"
    )
    run.add_argument(
        "--optimality-tol", type=float, default=1e-7, help="solver optimality tolerance"
    )
    run.add_argument(
        "--period-length",
        type=int,
        default=24,
        help="steps per typical period in days mode",
    )

    sample = sub.add_parser("sample-data", help="regenerate the bundled datasets")
    sample.add_argument(
        "--out", required=True, type=Path, help="directory for the sample CSV files"
    )
    sample.add_argument(
        "--steps", type=int, default=8760, help="number of hourly steps to generate"
    )
    return parser


def _cmd_run(args: argparse.Namespace) -> int:
    workers = args.workers if args.workers is not None else _default_workers()
    config = RunConfig(
        model=args.model,
        profiles=args.profiles,
        out_dir=args.out,
        mode=args.mode,
        step_counts=args.counts or DEFAULT_STEP_COUNTS,
        day_counts=args.counts or DEFAULT_DAY_COUNTS,
        period_length=args.period_length,
        extremes=args.extremes,
        tolerances=Tolerances(args.feasibility_tol, args.optimality_tol),
        workers=workers,
        export_lp=args.export_lp,
    )
    result = run_grid(config)
    failed = [r for r in result.reports if r.status != "ok"]
    for r in result.reports:
        marker = "ok " if r.status == "ok" else "ERR"
        print(
            f"[{marker}] {r.model} {r.mode:5s} k={r.cluster_count:<5d} "
            f"eq_steps={r.equivalent_steps:<5d} "
            + (
                f"deviation={r.deviation_rel:+.3e} rmse={r.accuracy.rmse_tot:.4f}"
                if r.status == "ok"
                else r.error
            )
        )
    print(
        f"reference objective {result.reference.objective!r} "
        f"({result.reference.method}, {result.reference.iterations} iterations)"
    )
    print(f"report written to {Path(config.out_dir) / 'report.csv'}")
    if failed:
        print(f"{len(failed)} of {len(result.reports)} configurations failed")
        return 1
    return 0


def _cmd_sample_data(args: argparse.Namespace) -> int:
    paths = write_sample_csvs(args.out, n_steps=args.steps)
    for name, path in sorted(paths.items()):
        print(f"{name}: {path}")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
    )
    if args.command == "run":
        return _cmd_run(args)
    if args.command == "sample-data":
        return _cmd_sample_data(args)
    raise AssertionError(f"unhandled command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
