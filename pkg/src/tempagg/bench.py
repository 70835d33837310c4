"""End-to-end benchmark runs over a grid of aggregation configurations.

A grid run loads one profile CSV, solves the full-resolution model once
as the reference, then for every (mode, cluster count) configuration
clusters the series, compiles and solves the aggregated model, and
collects accuracy indicators, objective deviations, cost breakdowns and
phase timings.  Results land in CSV files:

* ``report.csv``: one row per configuration, deterministic content
  (byte-identical across repeated runs on the same machine).
* ``indicators.csv``: per-attribute accuracy indicators.
* ``breakdown.csv``: per-component cost contributions.
* ``timings.csv``: per-phase wall times and peak RSS; everything that
  cannot be byte-stable lives here, not in report.csv.
* ``duration_curves/``: descending-sorted raw profile values per run.

A failing configuration is recorded with status=error and never aborts
the rest of the grid.
"""

from __future__ import annotations

import csv
import datetime as dt
import logging
import math
import resource
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .candidates import build_period_candidates, build_step_candidates
from .esom.compile import (
    CostBreakdown,
    compile_model,
    extract_cost_breakdown,
)
from .esom.components import EnergySystemSpec, load_spec
from .esom.grid import full_grid, grid_from_clustering
from .esom.scenarios import build_building_spec, build_dispatch_spec
from .lp import SolveStatus, Tolerances, solve
from .lptext import write_lp_file
from .metrics import AccuracyReport, accuracy_report, expand_to_full
from .series import NormalizationParams, TimeSeriesSet, normalize, rescale
from .ward import ward_cluster, inject_extreme_candidates

__all__ = [
    "DEFAULT_DAY_COUNTS",
    "DEFAULT_STEP_COUNTS",
    "RunConfig",
    "RunReport",
    "ReferenceRun",
    "GridResult",
    "load_csv",
    "run_grid",
    "emit_report",
]

logger = logging.getLogger(__name__)

DEFAULT_STEP_COUNTS = (24, 48, 96, 120, 240, 480, 960, 1920, 3840, 8760)
DEFAULT_DAY_COUNTS = (5, 10, 20, 40, 80, 160, 365)

_PHASES = ("cluster", "build", "solve", "map-back")


def _peak_rss_kib() -> int:
    return int(resource.getrusage(resource.RUSAGE_SELF).ru_maxrss)


@dataclass(frozen=True)
class RunConfig:
    """One grid invocation: model, data, modes, counts, output."""

    model: str
    profiles: Path
    out_dir: Path
    mode: str = "both"
    step_counts: tuple[int, ...] = DEFAULT_STEP_COUNTS
    day_counts: tuple[int, ...] = DEFAULT_DAY_COUNTS
    period_length: int = 24
    extremes: bool = False
    tolerances: Tolerances = field(default_factory=Tolerances)
    workers: int = 1
    export_lp: bool = False

    def __post_init__(self) -> None:
        if self.mode not in ("days", "steps", "both"):
            raise ValueError("mode must be 'days', 'steps' or 'both'")
        for counts in (self.step_counts, self.day_counts):
            if any(c < 1 for c in counts):
                raise ValueError("cluster counts must be positive")
            if len(set(counts)) != len(counts):
                raise ValueError("cluster counts must be unique")
        if self.period_length < 1:
            raise ValueError("period_length must be positive")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")


@dataclass
class ReferenceRun:
    """The full-resolution solve every configuration is compared against."""

    model: str
    objective: float
    breakdown: CostBreakdown
    n_variables: int
    n_constraints: int
    iterations: int
    method: str
    build_seconds: float
    solve_seconds: float


@dataclass
class RunReport:
    """Everything recorded about one (mode, cluster count) configuration."""

    model: str
    mode: str
    cluster_count: int
    equivalent_steps: int
    status: str = "ok"
    error: str = ""
    accuracy: AccuracyReport | None = None
    mean_dev_max: float = math.nan
    reference_objective: float = math.nan
    objective: float = math.nan
    deviation: float = math.nan
    deviation_rel: float = math.nan
    breakdown: CostBreakdown | None = None
    n_variables: int = 0
    n_constraints: int = 0
    iterations: int = 0
    method: str = ""
    phase_seconds: dict[str, float] = field(default_factory=dict)
    total_seconds: float = 0.0
    peak_rss_kib: int = 0
    duration_curves: np.ndarray | None = None


@dataclass
class GridResult:
    reports: list[RunReport]
    reference: ReferenceRun
    load_seconds: float
    attribute_names: tuple[str, ...]


def load_csv(path: Path | str) -> TimeSeriesSet:
    """Read a profile CSV: header of attribute names, one row per step.

    A leading timestamp column (header named like a time column, or a
    non-numeric first cell) is validated for strictly increasing stamps
    and otherwise ignored.  Malformed input fails with the row number.
    """
    path = Path(path)
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = [cell.strip() for cell in next(reader)]
        except StopIteration:
            raise ValueError(f"{path}: file is empty") from None
        rows = list(reader)
    if not rows:
        raise ValueError(f"{path}: no data rows after the header")
    has_timestamp = header and header[0].lower() in ("timestamp", "time", "datetime")
    if not has_timestamp and rows[0]:
        try:
            float(rows[0][0])
        except ValueError:
            has_timestamp = True
    names = tuple(header[1:] if has_timestamp else header)
    if not names:
        raise ValueError(f"{path}: header defines no attribute columns")
    duplicates = sorted({n for n in names if names.count(n) > 1})
    if duplicates:
        raise ValueError(f"{path}: duplicate attribute columns {duplicates}")
    width = len(header)
    values = np.empty((len(rows), len(names)))
    previous_stamp: dt.datetime | None = None
    for i, row in enumerate(rows):
        line = i + 2
        if len(row) != width:
            raise ValueError(
                f"{path}: row {line} has {len(row)} cells, expected {width}"
            )
        cells = row
        if has_timestamp:
            text = row[0].strip()
            try:
                stamp = dt.datetime.fromisoformat(text)
            except ValueError:
                raise ValueError(
                    f"{path}: row {line} has unparseable timestamp {text!r}"
                ) from None
            if previous_stamp is not None and stamp <= previous_stamp:
                raise ValueError(
                    f"{path}: timestamps not strictly increasing at row {line}"
                )
            previous_stamp = stamp
            cells = row[1:]
        for j, cell in enumerate(cells):
            try:
                value = float(cell)
            except ValueError:
                raise ValueError(
                    f"{path}: row {line}, column {names[j]!r}: "
                    f"{cell!r} is not a number"
                ) from None
            if not math.isfinite(value):
                raise ValueError(
                    f"{path}: row {line}, column {names[j]!r}: "
                    f"non-finite value {cell!r}"
                )
            values[i, j] = value
    return TimeSeriesSet(names, np.ascontiguousarray(values.T))


def resolve_model(model: str) -> EnergySystemSpec:
    """Map a model name or scenario file path onto a system spec."""
    if model == "building":
        return build_building_spec()
    if model == "dispatch":
        return build_dispatch_spec()
    path = Path(model)
    if path.exists():
        return load_spec(path)
    raise ValueError(
        f"unknown model {model!r}: expected 'building', 'dispatch' or an "
        "existing scenario JSON path"
    )


@dataclass(frozen=True)
class _Job:
    """Picklable inputs for one configuration run."""

    model: str
    mode: str
    cluster_count: int
    spec: EnergySystemSpec
    normalized: TimeSeriesSet
    params: NormalizationParams
    step_hours: float
    period_length: int
    reference_objective: float
    tolerances: Tolerances
    extremes: bool
    export_lp: bool
    out_dir: Path


def _run_job(job: _Job) -> RunReport:
    report = RunReport(
        model=job.model,
        mode=job.mode,
        cluster_count=job.cluster_count,
        equivalent_steps=job.cluster_count
        * (job.period_length if job.mode == "days" else 1),
    )
    start = time.perf_counter()
    try:
        _execute(job, report)
    except Exception as exc:  # noqa: BLE001 - a failed config must not kill the grid
        report.status = "error"
        report.error = f"{type(exc).__name__}: {exc}"
        logger.exception(
            "configuration %s/%s/%d failed", job.model, job.mode, job.cluster_count
        )
    report.total_seconds = time.perf_counter() - start
    report.peak_rss_kib = _peak_rss_kib()
    return report


def _execute(job: _Job, report: RunReport) -> None:
    normalized = job.normalized
    timer = time.perf_counter

    t = timer()
    if job.mode == "steps":
        candidates = build_step_candidates(normalized)
    else:
        candidates = build_period_candidates(normalized, job.period_length)
    result = ward_cluster(candidates, job.cluster_count)
    if job.extremes:
        result = inject_extreme_candidates(
            candidates, result, normalized.attribute_names
        )
    report.equivalent_steps = result.k * result.period_length
    report.accuracy = accuracy_report(normalized, result, job.params)
    expanded = expand_to_full(result, normalized.n_steps)
    report.mean_dev_max = float(
        np.max(np.abs(expanded.mean(axis=1) - normalized.values.mean(axis=1)))
    )
    raw = rescale(expanded, normalized.attribute_names, job.params)
    report.duration_curves = -np.sort(-raw, axis=1)
    report.phase_seconds["cluster"] = timer() - t

    t = timer()
    grid = grid_from_clustering(result, job.params, job.step_hours)
    compiled = compile_model(job.spec, grid)
    report.n_variables = compiled.lp.n_variables
    report.n_constraints = compiled.lp.n_constraints
    if job.export_lp:
        lp_dir = job.out_dir / "lp"
        lp_dir.mkdir(parents=True, exist_ok=True)
        write_lp_file(
            compiled.lp, lp_dir / f"{job.model}.{job.mode}.{job.cluster_count}.lp"
        )
    report.phase_seconds["build"] = timer() - t

    t = timer()
    solved = solve(compiled.lp, tolerances=job.tolerances, method=compiled.solver_hint)
    report.phase_seconds["solve"] = timer() - t
    if solved.status is not SolveStatus.OPTIMAL:
        raise RuntimeError(f"aggregated solve ended {solved.status.value}")

    t = timer()
    report.iterations = solved.iterations
    report.method = solved.method
    report.objective = float(solved.objective)
    report.reference_objective = job.reference_objective
    report.deviation = report.objective - job.reference_objective
    report.deviation_rel = report.deviation / job.reference_objective
    report.breakdown = extract_cost_breakdown(compiled, solved)
    report.phase_seconds["map-back"] = timer() - t
    report.status = "ok"


def run_grid(config: RunConfig) -> GridResult:
    """Run the whole configuration grid and emit the report files."""
    timer = time.perf_counter
    t = timer()
    ts = load_csv(config.profiles)
    load_seconds = timer() - t
    spec = resolve_model(config.model)
    # scenario paths would leak directories into report rows and LP
    # file names, so fall back to the file stem as the model label
    label = (
        config.model
        if config.model in ("building", "dispatch")
        else Path(config.model).stem
    )
    missing = [
        attr for attr in spec.profile_attributes() if attr not in ts.attribute_names
    ]
    if missing:
        raise ValueError(
            f"profiles {config.profiles} lack attributes {missing} required "
            f"by model {config.model!r}"
        )

    t = timer()
    reference_model = compile_model(spec, full_grid(ts))
    build_seconds = timer() - t
    t = timer()
    reference_solve = solve(
        reference_model.lp,
        tolerances=config.tolerances,
        method=reference_model.solver_hint,
    )
    solve_seconds = timer() - t
    if reference_solve.status is not SolveStatus.OPTIMAL:
        raise RuntimeError(
            f"full-resolution reference solve ended {reference_solve.status.value}"
        )
    reference = ReferenceRun(
        model=label,
        objective=float(reference_solve.objective),
        breakdown=extract_cost_breakdown(reference_model, reference_solve),
        n_variables=reference_model.lp.n_variables,
        n_constraints=reference_model.lp.n_constraints,
        iterations=reference_solve.iterations,
        method=reference_solve.method,
        build_seconds=build_seconds,
        solve_seconds=solve_seconds,
    )
    logger.info(
        "reference objective for %s: %.6f (%d iterations)",
        config.model, reference.objective, reference.iterations,
    )
    del reference_model, reference_solve

    normalized, params = normalize(ts)
    jobs = []
    if config.mode in ("steps", "both"):
        for count in config.step_counts:
            if count > ts.n_steps:
                raise ValueError(
                    f"step count {count} exceeds the {ts.n_steps}-step horizon"
                )
            jobs.append(("steps", count))
    if config.mode in ("days", "both"):
        n_periods = ts.n_steps // config.period_length
        if ts.n_steps % config.period_length:
            raise ValueError(
                f"horizon of {ts.n_steps} steps is not divisible by the "
                f"period length {config.period_length}"
            )
        for count in config.day_counts:
            if count > n_periods:
                raise ValueError(
                    f"day count {count} exceeds the {n_periods} available periods"
                )
            jobs.append(("days", count))

    job_inputs = [
        _Job(
            model=label,
            mode=mode,
            cluster_count=count,
            spec=spec,
            normalized=normalized,
            params=params,
            step_hours=ts.step_hours,
            period_length=config.period_length,
            reference_objective=reference.objective,
            tolerances=config.tolerances,
            extremes=config.extremes,
            export_lp=config.export_lp,
            out_dir=Path(config.out_dir),
        )
        for mode, count in jobs
    ]
    if config.workers > 1 and len(job_inputs) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            reports = list(pool.map(_run_job, job_inputs))
    else:
        reports = [_run_job(job) for job in job_inputs]
    reports.sort(key=lambda r: (r.mode, r.cluster_count))

    result = GridResult(
        reports=reports,
        reference=reference,
        load_seconds=load_seconds,
        attribute_names=ts.attribute_names,
    )
    emit_report(result, config.out_dir, original=ts)
    return result


def _fmt(value: float) -> str:
    return repr(float(value))


_REPORT_COLUMNS = (
    "model", "mode", "cluster_count", "equivalent_steps", "status", "error",
    "rmse_tot", "rmse_dc_tot", "mae_tot", "mean_dev_max",
    "reference_objective", "objective", "deviation", "deviation_rel",
    "n_variables", "n_constraints", "iterations", "method",
)


def emit_report(
    result: GridResult, out_dir: Path | str, original: TimeSeriesSet | None = None
) -> dict[str, Path]:
    """Write all result files; report.csv content is deterministic."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "report": out / "report.csv",
        "indicators": out / "indicators.csv",
        "breakdown": out / "breakdown.csv",
        "timings": out / "timings.csv",
    }

    with open(paths["report"], "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(_REPORT_COLUMNS)
        for r in result.reports:
            if r.status == "ok":
                acc = r.accuracy
                writer.writerow([
                    r.model, r.mode, r.cluster_count, r.equivalent_steps,
                    r.status, "",
                    _fmt(acc.rmse_tot), _fmt(acc.rmse_dc_tot), _fmt(acc.mae_tot),
                    _fmt(r.mean_dev_max),
                    _fmt(r.reference_objective), _fmt(r.objective),
                    _fmt(r.deviation), _fmt(r.deviation_rel),
                    r.n_variables, r.n_constraints, r.iterations, r.method,
                ])
            else:
                writer.writerow([
                    r.model, r.mode, r.cluster_count, r.equivalent_steps,
                    r.status, r.error,
                    "", "", "", "", "", "", "", "",
                    r.n_variables, r.n_constraints, "", "",
                ])

    with open(paths["indicators"], "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow([
            "model", "mode", "cluster_count", "attribute",
            "rmse", "rmse_dc", "mae", "rmse_raw", "mae_raw",
        ])
        for r in result.reports:
            if r.accuracy is None:
                continue
            acc = r.accuracy
            for i, attr in enumerate(acc.attribute_names):
                writer.writerow([
                    r.model, r.mode, r.cluster_count, attr,
                    _fmt(acc.rmse[i]), _fmt(acc.rmse_dc[i]), _fmt(acc.mae[i]),
                    _fmt(acc.rmse_raw[i]) if acc.rmse_raw is not None else "",
                    _fmt(acc.mae_raw[i]) if acc.mae_raw is not None else "",
                ])

    with open(paths["breakdown"], "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow([
            "model", "mode", "cluster_count", "component",
            "capex_annualized", "fixed_opex", "variable_opex",
        ])
        ref = result.reference
        for i, comp in enumerate(ref.breakdown.component_names):
            writer.writerow([
                ref.model, "full", "", comp,
                _fmt(ref.breakdown.capex_annualized[i]),
                _fmt(ref.breakdown.fixed_opex[i]),
                _fmt(ref.breakdown.variable_opex[i]),
            ])
        for r in result.reports:
            if r.breakdown is None:
                continue
            for i, comp in enumerate(r.breakdown.component_names):
                writer.writerow([
                    r.model, r.mode, r.cluster_count, comp,
                    _fmt(r.breakdown.capex_annualized[i]),
                    _fmt(r.breakdown.fixed_opex[i]),
                    _fmt(r.breakdown.variable_opex[i]),
                ])

    with open(paths["timings"], "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow([
            "model", "mode", "cluster_count", "phase", "seconds", "peak_rss_kib",
        ])
        ref = result.reference
        writer.writerow([ref.model, "full", "", "load",
                         _fmt(result.load_seconds), ""])
        writer.writerow([ref.model, "full", "", "build",
                         _fmt(ref.build_seconds), ""])
        writer.writerow([ref.model, "full", "", "solve",
                         _fmt(ref.solve_seconds), ""])
        for r in result.reports:
            for phase in _PHASES:
                if phase in r.phase_seconds:
                    writer.writerow([
                        r.model, r.mode, r.cluster_count, phase,
                        _fmt(r.phase_seconds[phase]), "",
                    ])
            writer.writerow([
                r.model, r.mode, r.cluster_count, "total",
                _fmt(r.total_seconds), r.peak_rss_kib,
            ])

    curve_dir = out / "duration_curves"
    curve_dir.mkdir(exist_ok=True)
    if original is not None:
        _write_curves(
            curve_dir / "full.csv",
            result.attribute_names,
            -np.sort(-original.values, axis=1),
        )
        paths["duration_curves"] = curve_dir
    for r in result.reports:
        if r.duration_curves is None:
            continue
        _write_curves(
            curve_dir / f"{r.mode}.{r.cluster_count}.csv",
            result.attribute_names,
            r.duration_curves,
        )
    return paths


def _write_curves(path: Path, names: tuple[str, ...], curves: np.ndarray) -> None:
    with open(path, "w", newline="") as handle:
        handle.write(",".join(names) + "\n")
        np.savetxt(handle, curves.T, fmt="%.17g", delimiter=",")
