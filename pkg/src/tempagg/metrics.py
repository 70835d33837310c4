"""Input-side accuracy indicators for an aggregation.

All indicators compare the original normalized series against the series
implied by the clustering, in which every step carries its cluster
representative's value.  Working in normalized space keeps attributes
comparable and bounds every indicator by 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .candidates import CandidateMode
from .series import NormalizationParams, TimeSeriesSet
from .ward import ClusterResult

__all__ = [
    "expand_to_full",
    "rmse",
    "rmse_duration_curve",
    "mae",
    "rmse_total",
    "mae_total",
    "AccuracyReport",
    "accuracy_report",
]


def expand_to_full(result: ClusterResult, n_steps: int) -> np.ndarray:
    """Predicted full-horizon matrix (n_attributes, n_steps).

    Step-mode clusterings repeat the cluster centroid at every member
    step.  Period-mode clusterings place the centroid's value at offset t
    into offset t of every member period, so within-period shape is kept.
    The requested horizon must match what the clustering covers.
    """
    n_attr = len(result.attribute_names)
    L = result.period_length
    covered = result.n_candidates * L
    if covered != n_steps:
        raise ValueError(
            f"clustering covers {covered} steps but {n_steps} were requested"
        )
    if result.mode is CandidateMode.STEP:
        return result.centroids[result.assignment].T
    blocks = result.centroids.reshape(result.k, n_attr, L)
    return blocks[result.assignment].transpose(1, 0, 2).reshape(n_attr, n_steps)


def _paired(original: np.ndarray, predicted: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    a = np.atleast_2d(np.asarray(original, dtype=np.float64))
    b = np.atleast_2d(np.asarray(predicted, dtype=np.float64))
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: original {a.shape} vs predicted {b.shape}")
    return a, b


def rmse(original: np.ndarray, predicted: np.ndarray) -> np.ndarray:
    """Root-mean-square error per attribute row."""
    a, b = _paired(original, predicted)
    return np.sqrt(np.mean((a - b) ** 2, axis=1))


def mae(original: np.ndarray, predicted: np.ndarray) -> np.ndarray:
    """Mean absolute error per attribute row."""
    a, b = _paired(original, predicted)
    return np.mean(np.abs(a - b), axis=1)


def rmse_duration_curve(original: np.ndarray, predicted: np.ndarray) -> np.ndarray:
    """RMSE between the descending-sorted rows of both inputs.

    Sorting discards chronology, so any permutation of the original
    scores zero.  Pairing sorted against sorted is the tightest pairing
    for a quadratic loss, hence this never exceeds the plain RMSE.
    """
    a, b = _paired(original, predicted)
    a_sorted = -np.sort(-a, axis=1)
    b_sorted = -np.sort(-b, axis=1)
    return np.sqrt(np.mean((a_sorted - b_sorted) ** 2, axis=1))


def rmse_total(per_attribute: np.ndarray) -> float:
    """Quadratic mean of per-attribute RMSE values."""
    vals = np.asarray(per_attribute, dtype=np.float64)
    return float(np.sqrt(np.mean(vals**2)))


def mae_total(per_attribute: np.ndarray) -> float:
    """Arithmetic mean of per-attribute MAE values."""
    return float(np.mean(np.asarray(per_attribute, dtype=np.float64)))


@dataclass(frozen=True)
class AccuracyReport:
    """Per-attribute indicators plus their totals.

    Values are in normalized units.  When the report was built with
    normalization parameters, ``rmse_raw`` and ``mae_raw`` additionally
    carry the same indicators rescaled to raw units (the duration-curve
    variant scales identically, by each attribute's value range).
    """

    attribute_names: tuple[str, ...]
    rmse: np.ndarray
    rmse_dc: np.ndarray
    mae: np.ndarray
    rmse_tot: float
    rmse_dc_tot: float
    mae_tot: float
    rmse_raw: np.ndarray | None = None
    mae_raw: np.ndarray | None = None

    def by_attribute(self, name: str) -> dict[str, float]:
        i = self.attribute_names.index(name)
        return {
            "rmse": float(self.rmse[i]),
            "rmse_dc": float(self.rmse_dc[i]),
            "mae": float(self.mae[i]),
        }


def accuracy_report(
    normalized: TimeSeriesSet,
    result: ClusterResult,
    params: NormalizationParams | None = None,
) -> AccuracyReport:
    """Score a clustering against the normalized series it was built from.

    ``normalized`` must be the same set the candidates were built from;
    attribute names and horizon are checked.  Passing ``params`` adds
    raw-unit RMSE/MAE columns for reporting; totals stay normalized.
    """
    if tuple(normalized.attribute_names) != tuple(result.attribute_names):
        raise ValueError(
            "attribute names of the series and the clustering disagree: "
            f"{normalized.attribute_names} vs {result.attribute_names}"
        )
    predicted = expand_to_full(result, normalized.n_steps)
    r = rmse(normalized.values, predicted)
    r_dc = rmse_duration_curve(normalized.values, predicted)
    m = mae(normalized.values, predicted)
    r_raw = m_raw = None
    if params is not None:
        spans = np.array(
            [hi - lo for lo, hi in map(params.bounds, normalized.attribute_names)]
        )
        r_raw = r * spans
        m_raw = m * spans
    return AccuracyReport(
        attribute_names=tuple(normalized.attribute_names),
        rmse=r,
        rmse_dc=r_dc,
        mae=m,
        rmse_tot=rmse_total(r),
        rmse_dc_tot=rmse_total(r_dc),
        mae_tot=mae_total(m),
        rmse_raw=r_raw,
        mae_raw=m_raw,
    )
