"""Pinhole camera geometry: back-projection, projection and rigid motion.

Conventions: pixel ``(u, v)`` has ``u`` along image columns and ``v`` along
rows, with integer coordinates at pixel centres. Camera frame is X right,
Y down, Z along the optical axis. Depths are metres, stored as float64.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from typing import Literal

import numpy as np

from .errors import BehindCameraError, InputError

Axis = Literal["x", "y", "z"]

_ORTHO_TOL = 1e-12


@dataclass(frozen=True)
class Intrinsics:
    f: float
    u0: float
    v0: float
    width: int
    height: int

    def __post_init__(self):
        if not (math.isfinite(self.f) and self.f > 0):
            raise InputError(f"focal length must be positive, got {self.f}")
        if self.width < 1 or self.height < 1:
            raise InputError(f"image size must be positive, got {self.width}x{self.height}")

    @classmethod
    def centered(cls, f: float, width: int, height: int) -> "Intrinsics":
        """Intrinsics with the principal point at the centre of the pixel grid."""
        return cls(float(f), (width - 1) / 2.0, (height - 1) / 2.0, int(width), int(height))

    def with_focal(self, f: float) -> "Intrinsics":
        return Intrinsics(float(f), self.u0, self.v0, self.width, self.height)

    def matrix(self) -> np.ndarray:
        return np.array(
            [[self.f, 0.0, self.u0], [0.0, self.f, self.v0], [0.0, 0.0, 1.0]]
        )


def load_presets() -> dict[str, dict]:
    text = resources.files("vflgen").joinpath("data/presets.json").read_text()
    return json.loads(text)


def preset_intrinsics(name: str) -> Intrinsics:
    try:
        p = load_presets()[name]
    except KeyError:
        raise InputError(f"unknown intrinsics preset {name!r}") from None
    return Intrinsics(p["f"], p["u0"], p["v0"], p["width"], p["height"])


@dataclass(frozen=True)
class RigidMotion:
    """Maps camera-frame points via ``X' = R (X - t)``."""

    R: np.ndarray
    t: np.ndarray

    def __post_init__(self):
        R = np.asarray(self.R, dtype=np.float64)
        t = np.asarray(self.t, dtype=np.float64).reshape(3)
        if R.shape != (3, 3):
            raise InputError(f"rotation must be 3x3, got {R.shape}")
        if np.abs(R.T @ R - np.eye(3)).max() > _ORTHO_TOL or abs(np.linalg.det(R) - 1.0) > _ORTHO_TOL:
            raise InputError("R is not a proper rotation matrix")
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "t", t)

    @classmethod
    def identity(cls) -> "RigidMotion":
        return cls(np.eye(3), np.zeros(3))

    def inverse(self) -> "RigidMotion":
        # X = R^T X' + t = R^T (X' - (-R t))
        return RigidMotion(self.R.T, -self.R @ self.t)


@dataclass(frozen=True)
class RgbdFrame:
    """Colour image, metric depth and a validity mask of equal size."""

    color: np.ndarray  # (H, W, 3) uint8
    depth: np.ndarray  # (H, W) float64, metres
    valid: np.ndarray = field(default=None)  # (H, W) bool

    def __post_init__(self):
        color = np.asarray(self.color)
        depth = np.asarray(self.depth, dtype=np.float64)
        if color.ndim != 3 or color.shape[2] != 3:
            raise InputError(f"color must be (H, W, 3), got {color.shape}")
        if depth.shape != color.shape[:2]:
            raise InputError(f"depth shape {depth.shape} does not match color {color.shape[:2]}")
        ok = np.isfinite(depth) & (depth > 0)
        if self.valid is not None:
            valid = np.asarray(self.valid, dtype=bool)
            if valid.shape != depth.shape:
                raise InputError("validity mask shape does not match depth")
            ok &= valid
        object.__setattr__(self, "color", color.astype(np.uint8, copy=False))
        object.__setattr__(self, "depth", depth)
        object.__setattr__(self, "valid", ok)

    @property
    def height(self) -> int:
        return self.depth.shape[0]

    @property
    def width(self) -> int:
        return self.depth.shape[1]


@dataclass(frozen=True)
class ColoredPointCloud:
    """N camera-frame points with their colours and source pixels ``(u, v)``.

    Points are kept in row-major source scan order; the z-buffer tie rule
    relies on it.
    """

    points: np.ndarray  # (N, 3) float64
    colors: np.ndarray  # (N, 3) uint8
    pixels: np.ndarray  # (N, 2) int64

    def __post_init__(self):
        n = len(self.points)
        if np.shape(self.points) != (n, 3) or np.shape(self.colors) != (n, 3) or np.shape(self.pixels) != (n, 2):
            raise InputError("points, colors and pixels must be (N, 3), (N, 3), (N, 2)")

    def __len__(self) -> int:
        return len(self.points)

    def with_points(self, points: np.ndarray) -> "ColoredPointCloud":
        return ColoredPointCloud(points, self.colors, self.pixels)


def backproject(frame: RgbdFrame, K: Intrinsics) -> ColoredPointCloud:
    if (frame.width, frame.height) != (K.width, K.height):
        raise InputError(
            f"frame is {frame.width}x{frame.height} but intrinsics expect {K.width}x{K.height}"
        )
    v, u = np.nonzero(frame.valid)
    Z = frame.depth[v, u]
    X = (u - K.u0) * Z / K.f
    Y = (v - K.v0) * Z / K.f
    return ColoredPointCloud(
        np.stack([X, Y, Z], axis=1),
        frame.color[v, u],
        np.stack([u, v], axis=1).astype(np.int64),
    )


def project(points, K: Intrinsics) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Continuous pixel coordinates and depth of one point or an (N, 3) array."""
    p = np.asarray(points, dtype=np.float64)
    X, Y, Z = p[..., 0], p[..., 1], p[..., 2]
    if np.any(~(Z > 0)):
        raise BehindCameraError("cannot project a point with Z <= 0")
    return K.f * X / Z + K.u0, K.f * Y / Z + K.v0, Z


def rotation_about_axis(axis: Axis, angle: float) -> np.ndarray:
    """Right-handed rotation matrix by ``angle`` radians about a camera axis."""
    if not math.isfinite(angle):
        raise InputError(f"rotation angle must be finite, got {angle}")
    c, s = math.cos(angle), math.sin(angle)
    if axis == "x":
        return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])
    if axis == "y":
        return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])
    if axis == "z":
        return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    raise InputError(f"axis must be one of x, y, z; got {axis!r}")


def apply_motion(cloud: ColoredPointCloud, m: RigidMotion) -> ColoredPointCloud:
    return cloud.with_points((cloud.points - m.t) @ m.R.T)


@dataclass(frozen=True)
class RecenteringSpec:
    """Camera rotation about ``axis`` by ``angle`` radians, then a new focal length.

    ``lateral`` picks how the sideways re-centring offset is applied:
    ``"per-point"`` evaluates it for every point, ``"mean"`` shares the cloud
    average across all points (a rigid lateral shift, which leaves
    depth-dependent parallax and therefore more holes).
    """

    axis: Literal["x", "y"]
    angle: float
    f_new: float
    lateral: Literal["per-point", "mean"] = "per-point"

    def __post_init__(self):
        if self.axis not in ("x", "y"):
            raise InputError(f"recentering axis must be 'x' or 'y', got {self.axis!r}")
        if not (math.isfinite(self.angle) and abs(self.angle) < math.pi / 2):
            raise InputError(f"|angle| must be below pi/2, got {self.angle}")
        if not (math.isfinite(self.f_new) and self.f_new > 0):
            raise InputError(f"new focal length must be positive, got {self.f_new}")
        if self.lateral not in ("per-point", "mean"):
            raise InputError(f"lateral must be 'per-point' or 'mean', got {self.lateral!r}")

    def rotation(self) -> np.ndarray:
        # The angle turns the camera; points move by the transpose.
        return rotation_about_axis(self.axis, -self.angle)


def recentering_offsets(cloud: ColoredPointCloud, K: Intrinsics, spec: RecenteringSpec) -> np.ndarray:
    """Per-point translations (N, 3) that keep the image centred after rotation.

    The axial component is always evaluated per point, using the same lateral
    offset that is applied to that point, so every depth scales by
    ``f_new / f`` exactly. Averaging the rows gives the recentering
    translation ``(Cx, Cy, Cz)`` whichever ``spec.lateral`` is chosen.
    """
    if len(cloud) == 0:
        raise InputError("recentering needs a non-empty cloud")
    X, Y, Z = cloud.points.T
    c, s, tn = math.cos(spec.angle), math.sin(spec.angle), math.tan(spec.angle)
    zoom = spec.f_new / K.f
    out = np.zeros_like(cloud.points)
    if spec.axis == "y":
        Cx = X - (X + Z * s) / c
        if spec.lateral == "mean":
            Cx = np.full_like(Cx, Cx.mean())
        out[:, 0] = Cx
        out[:, 2] = Z - Z * zoom / c + (X - Cx) * tn
    else:
        Cy = Y - (Y - Z * s) / c
        if spec.lateral == "mean":
            Cy = np.full_like(Cy, Cy.mean())
        out[:, 1] = Cy
        out[:, 2] = Z - Z * zoom / c - (Y - Cy) * tn
    return out


def recentering_translation(cloud: ColoredPointCloud, K: Intrinsics, spec: RecenteringSpec) -> np.ndarray:
    """The recentering translation ``(Cx, Cy, Cz)`` averaged over all points."""
    return recentering_offsets(cloud, K, spec).mean(axis=0)


def recenter(cloud: ColoredPointCloud, K: Intrinsics, spec: RecenteringSpec) -> ColoredPointCloud:
    """Rotate and re-centre ``cloud`` for a camera with focal length ``spec.f_new``."""
    R = spec.rotation()
    return cloud.with_points((cloud.points - recentering_offsets(cloud, K, spec)) @ R.T)
