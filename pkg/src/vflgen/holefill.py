"""Template hole filling for reprojected RGB-D frames.

Each hole is classified by the validity of its 3x3 neighbourhood:

* ``A`` -- all four 4-neighbours valid: mean of the 4-neighbours.
* ``B`` -- some but not all neighbours valid: mean of the valid 3x3 neighbours.
* ``C`` -- no valid neighbour at all: copy the left (m) or top (n) neighbour,
  chosen by a seeded fair coin, once one of them has been filled.

A pass fills every A/B hole from the values at the start of the pass, then
walks the C holes in raster order so that fills propagate right and down
within the same pass. Passes repeat until no hole is left.
"""

from __future__ import annotations

import enum

import numpy as np
from scipy import ndimage

from .errors import InputError, UnfillableError
from .geometry import RgbdFrame
from .reprojection import SparseRgbdFrame


class NeighborhoodClass(enum.Enum):
    A = "A"
    B = "B"
    C = "C"


def classify(window_validity) -> NeighborhoodClass:
    w = np.asarray(window_validity, dtype=bool)
    if w.shape != (3, 3):
        raise InputError(f"window must be 3x3, got {w.shape}")
    if w[1, 1]:
        raise InputError("window is not centred on a hole")
    if w[0, 1] and w[2, 1] and w[1, 0] and w[1, 2]:
        return NeighborhoodClass.A
    if not w.any():
        return NeighborhoodClass.C
    return NeighborhoodClass.B


def pixel_coins(seed: int, size: int) -> np.ndarray:
    """One fair coin per pixel index; True picks the left neighbour."""
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))
    return rng.random(size) < 0.5


def fill(frame: SparseRgbdFrame, seed: int) -> RgbdFrame:
    H, W = frame.depth.shape
    Wp = W + 2
    # Padded border cells stay unfilled forever: out-of-image reads count as holes.
    vals = np.zeros((H + 2, Wp, 4))
    vals[1:-1, 1:-1, 0] = frame.depth
    vals[1:-1, 1:-1, 1:] = frame.color
    filled = np.zeros((H + 2, Wp), dtype=bool)
    filled[1:-1, 1:-1] = ~frame.hole_mask
    vals = vals.reshape(-1, 4)
    filled = filled.reshape(-1)

    if not filled.any():
        raise UnfillableError("frame has no valid pixel to fill from")

    four = np.array([-Wp, Wp, -1, 1])
    eight = np.concatenate([four, [-Wp - 1, -Wp + 1, Wp - 1, Wp + 1]])
    holes = np.flatnonzero(~filled.reshape(H + 2, Wp)[1:-1, 1:-1])
    # image flat index -> padded flat index
    holes = (holes // W + 1) * Wp + holes % W + 1
    coins = pixel_coins(seed, H * W) if holes.size else None

    while holes.size:
        nb = filled[holes[:, None] + eight]  # (n, 8)
        n4 = nb[:, :4].sum(axis=1)
        n8 = nb.sum(axis=1)
        is_a = n4 == 4
        is_c = n8 == 0
        is_b = ~is_a & ~is_c

        a, b = holes[is_a], holes[is_b]
        new_a = vals[a[:, None] + four].mean(axis=1)
        nb_b = nb[is_b]
        nv = vals[b[:, None] + eight] * nb_b[:, :, None]
        new_b = nv.sum(axis=1) / n8[is_b][:, None]
        vals[a] = new_a
        vals[b] = new_b
        filled[a] = True
        filled[b] = True

        progress = a.size + b.size
        for k in holes[is_c]:
            left, top = filled[k - 1], filled[k - Wp]
            if left and top:
                r, c = divmod(int(k), Wp)
                src = k - 1 if coins[(r - 1) * W + c - 1] else k - Wp
            elif left:
                src = k - 1
            elif top:
                src = k - Wp
            else:
                continue
            vals[k] = vals[src]
            filled[k] = True
            progress += 1

        if progress == 0:
            break
        holes = holes[~filled[holes]]

    vals = vals.reshape(H + 2, Wp, 4)[1:-1, 1:-1]
    if holes.size:
        # Residue: copy the nearest (Euclidean) filled pixel.
        ok = filled.reshape(H + 2, Wp)[1:-1, 1:-1]
        _, (ri, ci) = ndimage.distance_transform_edt(~ok, return_indices=True)
        vals = vals[ri, ci]

    color = np.clip(np.rint(vals[..., 1:]), 0, 255).astype(np.uint8)
    return RgbdFrame(color, vals[..., 0].copy())
