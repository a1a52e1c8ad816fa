"""Reading and writing RGB-D pairs as 8-bit RGB PNG plus 16-bit depth PNG.

Depth files store ``round(depth_m * depth_scale)`` as unsigned 16-bit
greyscale; 0 marks a missing reading.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import BitDepthError, DimensionMismatchError, RgbdIOError, UnreadableImageError
from .geometry import RgbdFrame

DEFAULT_DEPTH_SCALE = 1000.0
_MAX_STORED = 65535


def _open(path) -> Image.Image:
    try:
        im = Image.open(path)
        im.load()
    except (OSError, UnidentifiedImageError) as exc:
        raise UnreadableImageError(f"cannot read image {path}: {exc}") from exc
    return im


def read_color(path) -> np.ndarray:
    im = _open(path)
    if im.mode != "RGB":
        raise BitDepthError(f"{path}: expected 8-bit RGB, got mode {im.mode}")
    return np.asarray(im, dtype=np.uint8)


def read_depth(path, depth_scale: float = DEFAULT_DEPTH_SCALE) -> np.ndarray:
    """Depth in metres from a 16-bit PNG (or an .npy array already in metres)."""
    if Path(path).suffix == ".npy":
        try:
            return np.load(path).astype(np.float64)
        except (OSError, ValueError) as exc:
            raise UnreadableImageError(f"cannot read depth array {path}: {exc}") from exc
    im = _open(path)
    if im.mode not in ("I;16", "I;16B", "I;16L"):
        raise BitDepthError(f"{path}: expected 16-bit greyscale depth, got mode {im.mode}")
    raw = np.asarray(im).astype(np.float64)
    return raw / depth_scale


def load_rgbd(color_path, depth_path, depth_scale: float = DEFAULT_DEPTH_SCALE) -> RgbdFrame:
    color = read_color(color_path)
    depth = read_depth(depth_path, depth_scale)
    if depth.shape != color.shape[:2]:
        raise DimensionMismatchError(
            f"{color_path} is {color.shape[1]}x{color.shape[0]} but {depth_path} is {depth.shape[1]}x{depth.shape[0]}"
        )
    return RgbdFrame(color, depth)


def encode_depth(depth, depth_scale: float = DEFAULT_DEPTH_SCALE, valid=None) -> tuple[np.ndarray, int]:
    """Quantize metres to uint16; returns the array and how many pixels were clamped."""
    depth = np.asarray(depth, dtype=np.float64)
    ok = np.isfinite(depth) & (depth > 0)
    if valid is not None:
        ok &= valid
    raw = np.zeros(depth.shape, dtype=np.float64)
    raw[ok] = np.floor(depth[ok] * depth_scale + 0.5)
    over = raw > _MAX_STORED
    raw[over] = _MAX_STORED
    # A positive depth below half a unit would round to the invalid marker.
    raw[ok & (raw == 0)] = 1
    return raw.astype(np.uint16), int(over.sum())


def save_rgbd(frame: RgbdFrame, color_path, depth_path, depth_scale: float = DEFAULT_DEPTH_SCALE) -> int:
    """Write the pair; returns the number of depth pixels clamped to the 16-bit range."""
    raw, clamped = encode_depth(frame.depth, depth_scale, frame.valid)
    try:
        Image.fromarray(np.ascontiguousarray(frame.color)).save(color_path, format="PNG")
        Image.fromarray(raw).save(depth_path, format="PNG")
    except OSError as exc:
        raise RgbdIOError(f"cannot write {color_path} / {depth_path}: {exc}") from exc
    return clamped
