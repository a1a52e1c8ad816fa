"""Procedural indoor RGB-D frames for tests and demos.

Each frame ray-casts a box-shaped room (floor, ceiling, side walls, back
wall) with a few frontoparallel panels standing in it, all textured
procedurally. Everything is derived from the seed, so the corpus is
reproducible byte for byte.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .geometry import Intrinsics, RgbdFrame
from .rgbd_io import DEFAULT_DEPTH_SCALE, save_rgbd

BUNDLED_SEED = 2018
BUNDLED_COUNT = 10


def _texture(rng, a, b, kind):
    base = rng.integers(40, 220, size=3)
    accent = rng.integers(0, 256, size=3)
    period = rng.uniform(0.1, 0.5)
    if kind == 0:
        mask = (np.floor(a / period) + np.floor(b / period)) % 2 == 0
    elif kind == 1:
        mask = np.sin(2 * np.pi * a / period) > 0
    else:
        mask = (np.sin(2 * np.pi * a / period) * np.sin(2 * np.pi * b / period)) > 0.2
    return np.where(mask[..., None], base, accent)


def render_room(K: Intrinsics, rng: np.random.Generator) -> RgbdFrame:
    H, W = K.height, K.width
    u = np.arange(W)[None, :]
    v = np.arange(H)[:, None]
    dx = np.broadcast_to((u - K.u0) / K.f, (H, W))
    dy = np.broadcast_to((v - K.v0) / K.f, (H, W))

    floor_y = rng.uniform(1.0, 1.5)
    ceil_y = -rng.uniform(1.2, 1.8)
    left_x = -rng.uniform(1.8, 2.6)
    right_x = rng.uniform(1.8, 2.6)
    back_z = rng.uniform(3.8, 5.0)

    depth = np.full((H, W), back_z)
    color = np.zeros((H, W, 3))
    with np.errstate(divide="ignore", invalid="ignore"):
        candidates = [
            (np.full((H, W), back_z), lambda z: (dx * z, dy * z)),
            (np.where(dy > 0, floor_y / dy, np.inf), lambda z: (dx * z, z)),
            (np.where(dy < 0, ceil_y / dy, np.inf), lambda z: (dx * z, z)),
            (np.where(dx < 0, left_x / dx, np.inf), lambda z: (z, dy * z)),
            (np.where(dx > 0, right_x / dx, np.inf), lambda z: (z, dy * z)),
        ]
    for _ in range(rng.integers(1, 4)):
        z = rng.uniform(2.0, back_z - 0.8)
        cx, cy = rng.uniform(-0.6, 0.6), rng.uniform(-0.1, 0.5)
        hw, hh = rng.uniform(0.15, 0.4), rng.uniform(0.15, 0.5)
        X, Y = dx * z, dy * z
        inside = (np.abs(X - cx) <= hw) & (np.abs(Y - cy) <= hh)
        candidates.append((np.where(inside, z, np.inf), lambda z, cx=cx, cy=cy: (dx * z - cx, dy * z - cy)))

    best = np.full((H, W), np.inf)
    for kind, (t, coords) in enumerate(candidates):
        t = np.where(t > 0, t, np.inf)
        closer = t < best
        if not closer.any():
            continue
        a, b = coords(np.where(closer, t, 1.0))
        tex = _texture(rng, a, b, kind % 3)
        color[closer] = tex[closer]
        best[closer] = t[closer]
    depth = best
    noise = rng.integers(-6, 7, size=(H, W, 3))
    color = np.clip(color + noise, 0, 255).astype(np.uint8)
    return RgbdFrame(color, depth)


def synthetic_frames(count: int = BUNDLED_COUNT, width: int = 640, height: int = 480,
                     f: float = 580.0, seed: int = BUNDLED_SEED) -> list[RgbdFrame]:
    K = Intrinsics.centered(f, width, height)
    seqs = np.random.SeedSequence(seed).spawn(count)
    return [render_room(K, np.random.default_rng(s)) for s in seqs]


def bundled_corpus() -> list[RgbdFrame]:
    """The reference corpus: ten 640x480 frames at the NYU focal length."""
    return synthetic_frames()


def write_corpus(out_dir, frames, depth_scale: float = DEFAULT_DEPTH_SCALE) -> list[Path]:
    """Write frames as ``frame_NNN.png`` / ``frame_NNN_depth.png``; returns colour paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for i, frame in enumerate(frames):
        color_path = out / f"frame_{i:03d}.png"
        save_rgbd(frame, color_path, out / f"frame_{i:03d}_depth.png", depth_scale)
        paths.append(color_path)
    return paths
