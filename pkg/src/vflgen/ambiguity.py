"""Scene pairs that image identically under different focal lengths.

A frontoparallel textured plane at depth ``D1`` seen with focal length ``f1``
produces exactly the same picture as the same plane at ``D2 = f2 * D1 / f1``
seen with ``f2``, while every depth differs by the factor ``f2 / f1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InputError
from .geometry import Intrinsics, RecenteringSpec, RgbdFrame, backproject, recenter
from .reprojection import SparseRgbdFrame, splat


def _positive(name: str, x: float) -> None:
    if not (isinstance(x, (int, float, Fraction)) and math.isfinite(x) and x > 0):
        raise InputError(f"{name} must be a positive finite number, got {x!r}")


def _exact_conjugate(D1, f1, f2) -> Fraction:
    return Fraction(f2) * Fraction(D1) / Fraction(f1)


def conjugate_depth(D1: float, f1: float, f2: float) -> float:
    """Depth at which focal length ``f2`` sees what ``f1`` sees at ``D1``.

    Evaluated exactly and rounded once.
    """
    for name, x in (("D1", D1), ("f1", f1), ("f2", f2)):
        _positive(name, x)
    return float(_exact_conjugate(D1, f1, f2))


@dataclass(frozen=True)
class PlaneScene:
    """Texture raster on a plane facing the camera.

    ``pitch`` is the side of one texel in metres; ``center`` is the (X, Y)
    position of the texture centre in metres.
    """

    texture: np.ndarray  # (h, w, 3) uint8
    pitch: float
    center: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        tex = np.asarray(self.texture)
        if tex.ndim != 3 or tex.shape[2] != 3 or tex.shape[0] < 1 or tex.shape[1] < 1:
            raise InputError(f"texture must be (h, w, 3), got {tex.shape}")
        _positive("pitch", self.pitch)
        object.__setattr__(self, "texture", tex.astype(np.uint8, copy=False))


def _texel_index(n_pix: int, principal, scale: Fraction, offset: Fraction) -> np.ndarray:
    c0 = Fraction(principal)
    return np.array([math.floor((Fraction(i) - c0) * scale + offset) for i in range(n_pix)], dtype=np.int64)


def render_plane(scene: PlaneScene, K: Intrinsics, depth) -> RgbdFrame:
    """Render the plane at ``depth`` (float or exact Fraction) through ``K``.

    Texel lookup is done in rational arithmetic so that two cameras with the
    same ``depth / f`` pick identical texels.
    """
    th, tw = scene.texture.shape[:2]
    pitch = Fraction(scene.pitch)
    scale = Fraction(depth) / (Fraction(K.f) * pitch)
    cols = _texel_index(K.width, K.u0, scale, Fraction(tw, 2) - Fraction(scene.center[0]) / pitch)
    rows = _texel_index(K.height, K.v0, scale, Fraction(th, 2) - Fraction(scene.center[1]) / pitch)
    col_ok = (cols >= 0) & (cols < tw)
    row_ok = (rows >= 0) & (rows < th)
    hit = row_ok[:, None] & col_ok[None, :]

    color = np.zeros((K.height, K.width, 3), dtype=np.uint8)
    ri = np.clip(rows, 0, th - 1)
    ci = np.clip(cols, 0, tw - 1)
    color[hit] = scene.texture[ri[:, None], ci[None, :]][hit]
    z = np.where(hit, float(depth), 0.0)
    return RgbdFrame(color, z)


@dataclass(frozen=True)
class AmbiguityPair:
    f1: float
    f2: float
    D1: float
    D2: float
    I1: np.ndarray
    I2: np.ndarray
    Z1: np.ndarray
    Z2: np.ndarray

    def record(self) -> dict:
        return {"f1": self.f1, "f2": self.f2, "D1": self.D1, "D2": self.D2}


def generate_pair(scene: PlaneScene, f1: float, f2: float, D1: float, K_template: Intrinsics) -> AmbiguityPair:
    for name, x in (("D1", D1), ("f1", f1), ("f2", f2)):
        _positive(name, x)
    D2 = _exact_conjugate(D1, f1, f2)
    view1 = render_plane(scene, K_template.with_focal(f1), D1)
    view2 = render_plane(scene, K_template.with_focal(f2), D2)
    if not view1.valid.any() or not view2.valid.any():
        raise InputError("plane is out of view")
    return AmbiguityPair(float(f1), float(f2), float(D1), float(D2), view1.color, view2.color, view1.depth, view2.depth)


def reproject_view(pair: AmbiguityPair, K_template: Intrinsics) -> SparseRgbdFrame:
    """Re-derive the second view from the first with the reprojection pipeline."""
    K1 = K_template.with_focal(pair.f1)
    cloud = backproject(RgbdFrame(pair.I1, pair.Z1), K1)
    moved = recenter(cloud, K1, RecenteringSpec("y", 0.0, pair.f2))
    return splat(moved, K_template.with_focal(pair.f2))


def checkerboard(rows: int, cols: int, cell: int = 1, colors=((255, 255, 255), (0, 0, 0))) -> np.ndarray:
    r = np.arange(rows)[:, None] // cell
    c = np.arange(cols)[None, :] // cell
    parity = (r + c) % 2
    palette = np.asarray(colors, dtype=np.uint8)
    return palette[parity]
