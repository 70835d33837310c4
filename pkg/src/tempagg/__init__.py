"""Temporal aggregation benchmark for energy system models.

The package covers the whole pipeline: load multi-attribute time series,
normalize them, cluster either single time steps or whole periods into
representatives with Ward's method, measure the aggregation error with
time series indicators, compile linear optimization models on the
aggregated grids, solve them, and compare costs and operation against
the full-resolution reference.
"""

from .candidates import (
    CandidateMatrix,
    CandidateMode,
    build_period_candidates,
    build_step_candidates,
    step_index_to_period,
)
from .lp import LinearProgram, SolveResult, SolveStatus, Tolerances, solve
from .lptext import export_lp_text, parse_lp_text, read_lp_file, write_lp_file
from .metrics import (
    AccuracyReport,
    accuracy_report,
    expand_to_full,
    mae,
    mae_total,
    rmse,
    rmse_duration_curve,
    rmse_total,
)
from .series import NormalizationParams, TimeSeriesSet, normalize, rescale
from .ward import (
    ClusterResult,
    Merge,
    WardTree,
    inject_extreme_candidates,
    ward_cluster,
    ward_tree,
)

__version__ = "0.1.0"

__all__ = [
    "AccuracyReport",
    "CandidateMatrix",
    "CandidateMode",
    "ClusterResult",
    "LinearProgram",
    "Merge",
    "NormalizationParams",
    "SolveResult",
    "SolveStatus",
    "TimeSeriesSet",
    "Tolerances",
    "WardTree",
    "accuracy_report",
    "build_period_candidates",
    "build_step_candidates",
    "expand_to_full",
    "export_lp_text",
    "inject_extreme_candidates",
    "mae",
    "mae_total",
    "normalize",
    "parse_lp_text",
    "read_lp_file",
    "rescale",
    "rmse",
    "rmse_duration_curve",
    "rmse_total",
    "solve",
    "step_index_to_period",
    "ward_cluster",
    "ward_tree",
    "write_lp_file",
]
