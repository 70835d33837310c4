"""Attribute-wise time series container and min-max scaling.

A :class:`TimeSeriesSet` holds one row per attribute (demand, capacity
factor, price, ...) over a common hourly grid.  Aggregation operates on
dimensionless data, so every series is mapped to [0, 1] with an affine
min-max transform before candidates are formed, and representative values
are mapped back afterwards with the recorded parameters.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "TimeSeriesSet",
    "NormalizationParams",
    "normalize",
    "rescale",
]


def _as_readonly_f64(values: object) -> np.ndarray:
    arr = np.array(values, dtype=np.float64, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class TimeSeriesSet:
    """Named multi-attribute time series on a shared step grid.

    :param attribute_names: one unique name per row of ``values``
    :param values: array of shape (n_attributes, n_steps), finite floats
    :param step_hours: duration of one step in hours (default hourly)
    """

    attribute_names: tuple[str, ...]
    values: np.ndarray
    step_hours: float = 1.0

    def __post_init__(self) -> None:
        names = tuple(str(n) for n in self.attribute_names)
        object.__setattr__(self, "attribute_names", names)
        if len(set(names)) != len(names):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise ValueError(f"duplicate attribute names: {dupes}")
        arr = np.atleast_2d(np.asarray(self.values, dtype=np.float64))
        if arr.ndim != 2:
            raise ValueError(f"values must be 2-dimensional, got shape {arr.shape}")
        if arr.shape[0] != len(names):
            raise ValueError(
                f"{len(names)} attribute names but {arr.shape[0]} value rows"
            )
        if arr.shape[1] < 1:
            raise ValueError("need at least one time step")
        if not np.all(np.isfinite(arr)):
            bad = np.argwhere(~np.isfinite(arr))[0]
            raise ValueError(
                f"non-finite value for attribute {names[bad[0]]!r} at step {bad[1]}"
            )
        if not (np.isfinite(self.step_hours) and self.step_hours > 0):
            raise ValueError(f"step_hours must be positive, got {self.step_hours}")
        object.__setattr__(self, "values", _as_readonly_f64(arr))

    @property
    def n_attributes(self) -> int:
        return len(self.attribute_names)

    @property
    def n_steps(self) -> int:
        return int(self.values.shape[1])

    def index_of(self, attribute: str) -> int:
        try:
            return self.attribute_names.index(attribute)
        except ValueError:
            raise KeyError(
                f"unknown attribute {attribute!r}; have {list(self.attribute_names)}"
            ) from None

    def series(self, attribute: str) -> np.ndarray:
        """Return the (read-only) row for one attribute."""
        return self.values[self.index_of(attribute)]

    def subset(self, attributes: Iterable[str]) -> "TimeSeriesSet":
        """New set restricted to ``attributes``, in the given order."""
        names = list(attributes)
        rows = [self.index_of(a) for a in names]
        return TimeSeriesSet(tuple(names), self.values[rows], self.step_hours)


@dataclass(frozen=True)
class NormalizationParams:
    """Per-attribute minima and maxima recorded by :func:`normalize`."""

    attribute_names: tuple[str, ...]
    minima: np.ndarray
    maxima: np.ndarray

    def __post_init__(self) -> None:
        names = tuple(str(n) for n in self.attribute_names)
        object.__setattr__(self, "attribute_names", names)
        lo = np.asarray(self.minima, dtype=np.float64).reshape(-1)
        hi = np.asarray(self.maxima, dtype=np.float64).reshape(-1)
        if not (len(names) == lo.size == hi.size):
            raise ValueError("attribute_names, minima and maxima must align")
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise ValueError("normalization bounds must be finite")
        if np.any(lo > hi):
            bad = names[int(np.argmax(lo > hi))]
            raise ValueError(f"minimum exceeds maximum for attribute {bad!r}")
        object.__setattr__(self, "minima", _as_readonly_f64(lo))
        object.__setattr__(self, "maxima", _as_readonly_f64(hi))

    def bounds(self, attribute: str) -> tuple[float, float]:
        try:
            i = self.attribute_names.index(attribute)
        except ValueError:
            raise KeyError(f"no normalization bounds recorded for {attribute!r}") from None
        return float(self.minima[i]), float(self.maxima[i])


def normalize(ts: TimeSeriesSet) -> tuple[TimeSeriesSet, NormalizationParams]:
    """Scale every attribute independently to the unit interval.

    Each row x' is mapped to (x' - min) / (max - min) with the row's own
    extrema, so the transform of one attribute never depends on another.
    A constant row has zero range and no canonical image; it is mapped to
    all zeros, and :func:`rescale` restores the constant from the recorded
    minimum.  The input is not modified.

    :return: the scaled set and the parameters needed to invert it
    """
    lo = ts.values.min(axis=1)
    hi = ts.values.max(axis=1)
    span = hi - lo
    scaled = np.zeros_like(ts.values)
    live = span > 0.0
    scaled[live] = (ts.values[live] - lo[live, None]) / span[live, None]
    params = NormalizationParams(ts.attribute_names, lo, hi)
    return TimeSeriesSet(ts.attribute_names, scaled, ts.step_hours), params


def rescale(
    values: np.ndarray,
    attribute_names: Sequence[str],
    params: NormalizationParams,
) -> np.ndarray:
    """Map normalized values back to raw units, row by row.

    ``values`` holds one row per entry of ``attribute_names``; every named
    attribute must have bounds in ``params``.  The inverse transform is
    min + c * (max - min), the exact affine inverse of :func:`normalize`,
    which makes normalize followed by rescale an identity up to floating
    point rounding.

    :param values: array of shape (len(attribute_names), m)
    :param attribute_names: row labels for ``values``
    :param params: bounds recorded when the data was normalized
    :return: new array of the same shape in raw units
    """
    arr = np.atleast_2d(np.asarray(values, dtype=np.float64))
    if arr.shape[0] != len(attribute_names):
        raise ValueError(
            f"{len(attribute_names)} attribute names but {arr.shape[0]} value rows"
        )
    out = np.empty_like(arr)
    for i, name in enumerate(attribute_names):
        lo, hi = params.bounds(str(name))
        out[i] = lo + arr[i] * (hi - lo)
    return out
