"""Build clustering candidates from a normalized time series set.

Two candidate geometries are supported.  In step mode every time step
becomes one candidate whose features are the attribute values at that
step.  In period mode the horizon is split into consecutive blocks of
equal length and every block becomes one candidate; its feature vector
concatenates the blocks of all attributes (attribute-major, time-minor),
so features [a * L, (a + 1) * L) hold attribute a over offsets 0..L-1.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .series import TimeSeriesSet

__all__ = [
    "CandidateMode",
    "CandidateMatrix",
    "build_step_candidates",
    "build_period_candidates",
    "step_index_to_period",
]


class CandidateMode(str, Enum):
    """What one clustering candidate stands for."""

    STEP = "step"
    PERIOD = "period"


@dataclass(frozen=True)
class CandidateMatrix:
    """Candidate rows plus the layout needed to interpret them.

    ``rows`` has shape (n_candidates, n_features).  In step mode
    n_features equals the attribute count; in period mode it equals
    n_attributes * period_length with the attribute-major feature layout
    described in the module docstring.  ``dropped_steps`` is nonzero only
    when period building truncated a trailing remainder.
    """

    rows: np.ndarray
    mode: CandidateMode
    attribute_names: tuple[str, ...]
    period_length: int = 1
    dropped_steps: int = 0

    def __post_init__(self) -> None:
        arr = np.asarray(self.rows, dtype=np.float64)
        if arr.ndim != 2:
            raise ValueError(f"candidate rows must be 2-dimensional, got {arr.shape}")
        if self.period_length < 1:
            raise ValueError("period_length must be at least 1")
        if self.mode is CandidateMode.STEP and self.period_length != 1:
            raise ValueError("step candidates have period_length 1")
        expect = len(self.attribute_names) * self.period_length
        if arr.shape[1] != expect:
            raise ValueError(
                f"expected {expect} features for {len(self.attribute_names)} "
                f"attributes x block length {self.period_length}, got {arr.shape[1]}"
            )
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "rows", arr)
        object.__setattr__(self, "attribute_names", tuple(self.attribute_names))

    @property
    def n_candidates(self) -> int:
        return int(self.rows.shape[0])

    @property
    def n_attributes(self) -> int:
        return len(self.attribute_names)

    def attribute_block(self, candidate: int, attribute_index: int) -> np.ndarray:
        """Feature slice of one attribute within one candidate row."""
        L = self.period_length
        return self.rows[candidate, attribute_index * L : (attribute_index + 1) * L]


def build_step_candidates(ts: TimeSeriesSet) -> CandidateMatrix:
    """One candidate per time step: the transposed value matrix."""
    return CandidateMatrix(
        rows=ts.values.T,
        mode=CandidateMode.STEP,
        attribute_names=ts.attribute_names,
    )


def build_period_candidates(
    ts: TimeSeriesSet, period_length: int, truncate: bool = False
) -> CandidateMatrix:
    """One candidate per consecutive block of ``period_length`` steps.

    The horizon must be an exact multiple of the block length.  If it is
    not, the call fails unless ``truncate`` is set, in which case the
    trailing remainder steps are dropped and their count is recorded on
    the returned matrix.

    The reshape is lossless: candidate p, feature a * L + t carries the
    value of attribute a at step p * L + t.
    """
    if period_length < 1:
        raise ValueError("period_length must be at least 1")
    n_steps = ts.n_steps
    remainder = n_steps % period_length
    if remainder and not truncate:
        raise ValueError(
            f"{n_steps} steps is not a multiple of period length {period_length}; "
            f"pass truncate=True to drop the trailing {remainder} steps"
        )
    usable = n_steps - remainder
    n_periods = usable // period_length
    if n_periods < 1:
        raise ValueError(
            f"period length {period_length} exceeds the {n_steps}-step horizon"
        )
    # (n_attr, n_periods, L) -> (n_periods, n_attr, L) -> flatten per period
    blocks = ts.values[:, :usable].reshape(ts.n_attributes, n_periods, period_length)
    rows = blocks.transpose(1, 0, 2).reshape(n_periods, -1)
    return CandidateMatrix(
        rows=rows,
        mode=CandidateMode.PERIOD,
        attribute_names=ts.attribute_names,
        period_length=period_length,
        dropped_steps=remainder,
    )


def step_index_to_period(step: int, period_length: int) -> tuple[int, int]:
    """Map a zero-based step index to (period index, offset inside period).

    The mapping is p = step // period_length, t = step - p * period_length,
    so step 100 with 24-step periods lands in period 4 at offset 4.
    """
    if period_length < 1:
        raise ValueError("period_length must be at least 1")
    if step < 0:
        raise ValueError(f"step index must be non-negative, got {step}")
    p, t = divmod(int(step), int(period_length))
    return p, t
