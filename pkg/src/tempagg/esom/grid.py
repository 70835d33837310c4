"""Aggregated time grids: what a compiled model iterates over.

A grid tells the compiler which representative elements exist, what raw
profile values they carry, how many original elements each one stands
for, and how original steps map onto representatives.  Three modes:

* FULL: every original step is its own representative.
* TYPICAL_STEPS: representatives are clustered single steps.
* TYPICAL_PERIODS: representatives are clustered blocks of consecutive
  steps (one typical period spans ``period_length`` offsets).

Representative values are stored in raw units; building a grid from a
clustering therefore rescales the normalized centroids back through the
recorded normalization parameters.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from ..candidates import CandidateMode
from ..series import NormalizationParams, TimeSeriesSet, rescale
from ..ward import ClusterResult

__all__ = ["GridMode", "AggregatedTimeGrid", "full_grid", "grid_from_clustering"]


class GridMode(str, Enum):
    FULL = "full"
    TYPICAL_STEPS = "typical_steps"
    TYPICAL_PERIODS = "typical_periods"


@dataclass(frozen=True)
class AggregatedTimeGrid:
    """Representative time elements with weights and the step mapping.

    ``representatives`` has shape (k, n_attributes, period_length) in raw
    units.  ``assignment`` maps original elements (steps for FULL and
    TYPICAL_STEPS, periods for TYPICAL_PERIODS) to representatives, and
    ``weights[c]`` counts how many original elements representative c
    stands for.  The weighted element count always covers the horizon:
    sum(weights) * period_length == n_original_steps.
    """

    mode: GridMode
    attribute_names: tuple[str, ...]
    representatives: np.ndarray
    assignment: np.ndarray
    weights: np.ndarray
    n_original_steps: int
    step_hours: float = 1.0

    def __post_init__(self) -> None:
        reps = np.asarray(self.representatives, dtype=np.float64)
        assignment = np.asarray(self.assignment, dtype=np.int64)
        weights = np.asarray(self.weights, dtype=np.int64)
        if reps.ndim != 3:
            raise ValueError(
                "representatives must have shape (k, n_attributes, period_length)"
            )
        k, n_attr, _length = reps.shape
        if n_attr != len(self.attribute_names):
            raise ValueError("attribute axis does not match attribute_names")
        if weights.shape != (k,) or np.any(weights < 1):
            raise ValueError("weights must hold one positive count per representative")
        if assignment.ndim != 1 or assignment.size == 0:
            raise ValueError("assignment must be a non-empty vector")
        if assignment.min() < 0 or assignment.max() >= k:
            raise ValueError("assignment references unknown representatives")
        counted = np.bincount(assignment, minlength=k)
        if not np.array_equal(counted, weights):
            raise ValueError("weights must equal assignment counts")
        if int(weights.sum()) * self.period_length != self.n_original_steps:
            raise ValueError(
                f"grid covers {int(weights.sum()) * self.period_length} steps "
                f"but claims a {self.n_original_steps}-step horizon"
            )
        if self.step_hours <= 0:
            raise ValueError("step_hours must be positive")
        for arr in (reps, assignment, weights):
            arr.setflags(write=False)
        object.__setattr__(self, "representatives", reps)
        object.__setattr__(self, "assignment", assignment)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "attribute_names", tuple(self.attribute_names))

    @property
    def k(self) -> int:
        return int(self.representatives.shape[0])

    @property
    def period_length(self) -> int:
        return int(self.representatives.shape[2])

    @property
    def equivalent_steps(self) -> int:
        """Distinct time elements the compiled model will carry."""
        return self.k * self.period_length

    def attribute_index(self, attribute: str) -> int:
        try:
            return self.attribute_names.index(attribute)
        except ValueError:
            raise KeyError(
                f"grid has no profile attribute {attribute!r}; "
                f"available: {list(self.attribute_names)}"
            ) from None

    def profile(self, attribute: str) -> np.ndarray:
        """Representative values of one attribute, shape (k, period_length)."""
        return self.representatives[:, self.attribute_index(attribute), :]


def full_grid(ts: TimeSeriesSet) -> AggregatedTimeGrid:
    """The identity grid: one singleton representative per original step."""
    n = ts.n_steps
    return AggregatedTimeGrid(
        mode=GridMode.FULL,
        attribute_names=ts.attribute_names,
        representatives=ts.values.T[:, :, None],
        assignment=np.arange(n),
        weights=np.ones(n, dtype=np.int64),
        n_original_steps=n,
        step_hours=ts.step_hours,
    )


def grid_from_clustering(
    result: ClusterResult,
    params: NormalizationParams,
    step_hours: float = 1.0,
) -> AggregatedTimeGrid:
    """Turn normalized cluster centroids into a raw-unit time grid."""
    k = result.k
    n_attr = len(result.attribute_names)
    length = result.period_length
    blocks = result.centroids.reshape(k, n_attr, length)
    flat = blocks.transpose(1, 0, 2).reshape(n_attr, k * length)
    raw = rescale(flat, result.attribute_names, params)
    reps = raw.reshape(n_attr, k, length).transpose(1, 0, 2)
    mode = (
        GridMode.TYPICAL_STEPS
        if result.mode is CandidateMode.STEP
        else GridMode.TYPICAL_PERIODS
    )
    return AggregatedTimeGrid(
        mode=mode,
        attribute_names=result.attribute_names,
        representatives=reps,
        assignment=result.assignment,
        weights=result.sizes,
        n_original_steps=result.n_candidates * length,
        step_hours=step_hours,
    )
