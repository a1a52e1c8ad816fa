"""Depth evaluation metrics and the MSE / BerHu reference losses."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .errors import EmptyEvaluationError, InputError

DELTA_BASE = 1.25
BERHU_FRACTION = 0.05


@dataclass(frozen=True)
class MetricsReport:
    rel: float
    rms: float
    log10: float
    delta1: float
    delta2: float
    delta3: float
    valid_pixel_count: int
    nonpositive_pred_count: int = 0

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def valid_mask(gt, cap: float | None = None) -> np.ndarray:
    gt = np.asarray(gt, dtype=np.float64)
    mask = np.isfinite(gt) & (gt > 0)
    if cap is not None:
        mask &= gt <= cap
    return mask


def _valid_pairs(pred, gt, cap=None) -> tuple[np.ndarray, np.ndarray]:
    pred = np.asarray(pred, dtype=np.float64)
    gt = np.asarray(gt, dtype=np.float64)
    if pred.shape != gt.shape:
        raise InputError(f"prediction shape {pred.shape} does not match ground truth {gt.shape}")
    mask = valid_mask(gt, cap)
    if not mask.any():
        raise EmptyEvaluationError("no valid ground-truth pixels")
    return pred[mask], gt[mask]


def evaluate(pred, gt, cap: float | None = None) -> MetricsReport:
    """Error and accuracy metrics over pixels with valid (and capped) ground truth.

    Non-positive predictions have no logarithm: they are left out of log10,
    never count as accurate for the delta thresholds, and are tallied in
    ``nonpositive_pred_count``.
    """
    y, y_star = _valid_pairs(pred, gt, cap)
    diff = y - y_star
    rel = float(np.mean(np.abs(diff) / y_star))
    rms = float(np.sqrt(np.mean(diff**2)))

    pos = y > 0
    if pos.any():
        log10 = float(np.mean(np.abs(np.log10(y[pos]) - np.log10(y_star[pos]))))
    else:
        log10 = float("nan")

    ratio = np.full(y.shape, np.inf)
    ratio[pos] = np.maximum(y[pos] / y_star[pos], y_star[pos] / y[pos])
    deltas = [float(np.mean(ratio < DELTA_BASE**k)) for k in (1, 2, 3)]
    return MetricsReport(rel, rms, log10, *deltas, int(y.size), int((~pos).sum()))


def mse_loss(pred, gt) -> float:
    y, y_star = _valid_pairs(pred, gt)
    return float(np.mean((y - y_star) ** 2))


def berhu_values(residuals) -> np.ndarray:
    """Per-residual reverse Huber penalty with threshold 0.05 * max |r|."""
    r = np.abs(np.asarray(residuals, dtype=np.float64))
    c = BERHU_FRACTION * r.max() if r.size else 0.0
    if c == 0:
        return r
    # (r^2 + c^2) / (2c) written so that tiny residuals do not underflow
    return np.where(r <= c, r, 0.5 * (r * (r / c) + c))


def berhu_loss(pred, gt) -> float:
    y, y_star = _valid_pairs(pred, gt)
    return float(np.mean(berhu_values(y - y_star)))
