"""Z-buffered forward splatting of a coloured point cloud onto a pixel grid."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import ColoredPointCloud, Intrinsics


@dataclass(frozen=True)
class SparseRgbdFrame:
    color: np.ndarray  # (H, W, 3) uint8, black at holes
    depth: np.ndarray  # (H, W) float64, 0 at holes
    hole_mask: np.ndarray  # (H, W) bool, True where no point landed

    @property
    def hole_fraction(self) -> float:
        return float(self.hole_mask.mean())


def quantize(x: np.ndarray) -> np.ndarray:
    """Round half up to the nearest integer pixel."""
    return np.floor(np.asarray(x, dtype=np.float64) + 0.5).astype(np.int64)


def splat(cloud: ColoredPointCloud, K_new: Intrinsics) -> SparseRgbdFrame:
    """Project every point through ``K_new`` and keep the nearest per pixel.

    Exact depth ties go to the point that comes first in cloud order, so the
    result does not depend on how the work is scheduled.
    """
    H, W = K_new.height, K_new.width
    color = np.zeros((H, W, 3), dtype=np.uint8)
    depth = np.zeros((H, W), dtype=np.float64)
    hole = np.ones((H, W), dtype=bool)

    P = cloud.points
    front = P[:, 2] > 0
    order = np.flatnonzero(front)
    X, Y, Z = P[order].T
    u = quantize(K_new.f * X / Z + K_new.u0)
    v = quantize(K_new.f * Y / Z + K_new.v0)
    inside = (u >= 0) & (u < W) & (v >= 0) & (v < H)
    order, u, v, Z = order[inside], u[inside], v[inside], Z[inside]
    if order.size == 0:
        return SparseRgbdFrame(color, depth, hole)

    pix = v * W + u
    # Sort by pixel, then depth, then cloud order; the first of each pixel group wins.
    idx = np.lexsort((order, Z, pix))
    pix_sorted = pix[idx]
    first = np.ones(idx.size, dtype=bool)
    first[1:] = pix_sorted[1:] != pix_sorted[:-1]
    win = idx[first]

    flat = pix[win]
    depth.reshape(-1)[flat] = Z[win]
    color.reshape(-1, 3)[flat] = cloud.colors[order[win]]
    hole.reshape(-1)[flat] = False
    return SparseRgbdFrame(color, depth, hole)
