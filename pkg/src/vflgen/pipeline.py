"""Batch generation of varying-focal-length datasets and batch evaluation.

Input frames are discovered as ``<stem>.png`` + ``<stem>_depth.png`` pairs.
Each (frame, focal) output lands in ``<output_dir>/f<focal>/`` with the same
naming, and the run is summarised in ``<output_dir>/manifest.json``.
"""

from __future__ import annotations

import dataclasses
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

import numpy as np

from .errors import EmptyEvaluationError, InputError, VflError
from .geometry import Intrinsics, RecenteringSpec, backproject, recenter, recentering_translation
from .holefill import fill
from .metrics import MetricsReport, evaluate, valid_mask
from .reprojection import splat
from .rgbd_io import DEFAULT_DEPTH_SCALE, load_rgbd, read_depth, save_rgbd

log = logging.getLogger(__name__)

DEFAULT_FOCALS = (460.0, 500.0, 540.0, 620.0, 660.0, 700.0)
NYU_FOCAL = 580.0
MAX_ROT_DEG = 5.0
DEPTH_SUFFIX = "_depth.png"
MANIFEST_NAME = "manifest.json"


@dataclass
class TransformConfig:
    input_dir: str
    output_dir: str
    focals: tuple = DEFAULT_FOCALS
    source_focal: float = NYU_FOCAL
    rot_axis: str = "none"
    rot_deg: Union[float, str] = 0.0
    seed: int = 0
    depth_scale: float = DEFAULT_DEPTH_SCALE
    lateral: str = "per-point"
    share_rotation: bool = False

    def __post_init__(self):
        self.focals = tuple(float(f) for f in self.focals)
        if not self.focals or any(not (f > 0) for f in self.focals):
            raise InputError("focals must be a non-empty list of positive values")
        if not self.source_focal > 0:
            raise InputError("source_focal must be positive")
        if self.rot_axis not in ("x", "y", "none"):
            raise InputError(f"rot_axis must be x, y or none, got {self.rot_axis!r}")
        if self.rot_deg != "uniform":
            self.rot_deg = float(self.rot_deg)
            if abs(self.rot_deg) > MAX_ROT_DEG:
                raise InputError(f"|rot_deg| must be at most {MAX_ROT_DEG}, got {self.rot_deg}")
        if not (0 <= int(self.seed) < 2**64):
            raise InputError("seed must be an unsigned 64-bit integer")
        self.seed = int(self.seed)
        if self.lateral not in ("per-point", "mean"):
            raise InputError(f"lateral must be per-point or mean, got {self.lateral!r}")

    @classmethod
    def from_json(cls, path, **overrides) -> "TransformConfig":
        data = json.loads(Path(path).read_text())
        data.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**data)

    def public_dict(self) -> dict:
        """Config fields that shape the outputs (directories left out)."""
        d = dataclasses.asdict(self)
        d.pop("input_dir")
        d.pop("output_dir")
        d["focals"] = list(self.focals)
        return d


@dataclass
class ManifestEntry:
    source_path: str
    output_path: str
    depth_path: str
    focal_px: float
    rot_axis: str
    rot_deg: float
    translation: list
    seed: int
    hole_fraction_before_fill: float
    clamped_depth_pixels: int = 0
    status: str = "ok"
    error: str | None = None


@dataclass
class DatasetManifest:
    config: dict
    entries: list = field(default_factory=list)

    @property
    def failed(self) -> int:
        return sum(e.status != "ok" for e in self.entries)

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "failed": self.failed,
            "entries": [dataclasses.asdict(e) for e in self.entries],
        }

    def write(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")


def discover_pairs(input_dir) -> list[tuple[str, Path, Path]]:
    root = Path(input_dir)
    pairs = []
    for color in sorted(root.glob("*.png")):
        if color.name.endswith(DEPTH_SUFFIX):
            continue
        depth = root / (color.stem + DEPTH_SUFFIX)
        if depth.exists():
            pairs.append((color.stem, color, depth))
    return pairs


def derive_seed(*key: int) -> int:
    """Independent 64-bit seed for a tuple of non-negative integers."""
    a, b = np.random.SeedSequence([int(k) for k in key]).generate_state(2, dtype=np.uint32)
    return (int(a) << 32) | int(b)


def _rotation_for(config: TransformConfig, frame_idx: int, focal_idx: int) -> tuple[str, float]:
    if config.rot_axis == "none":
        return "none", 0.0
    if config.rot_deg != "uniform":
        return config.rot_axis, config.rot_deg
    key = (config.seed, frame_idx, 0 if config.share_rotation else focal_idx + 1, 1)
    rng = np.random.default_rng(np.random.SeedSequence(list(key)))
    return config.rot_axis, float(rng.uniform(-MAX_ROT_DEG, MAX_ROT_DEG))


def _focal_dir(f: float) -> str:
    return f"f{f:g}"


def _process_frame(args) -> list[ManifestEntry]:
    config, frame_idx, stem, color_path, depth_path = args
    out_root = Path(config.output_dir)
    entries = []
    try:
        frame = load_rgbd(color_path, depth_path, config.depth_scale)
        K = Intrinsics.centered(config.source_focal, frame.width, frame.height)
        cloud = backproject(frame, K)
        load_error = None
    except (VflError, OSError) as exc:
        load_error = f"{type(exc).__name__}: {exc}"

    for focal_idx, f_new in enumerate(config.focals):
        seed = derive_seed(config.seed, frame_idx, focal_idx)
        axis, deg = _rotation_for(config, frame_idx, focal_idx)
        rel_color = f"{_focal_dir(f_new)}/{stem}.png"
        rel_depth = f"{_focal_dir(f_new)}/{stem}{DEPTH_SUFFIX}"
        entry = ManifestEntry(
            source_path=color_path.name, output_path=rel_color, depth_path=rel_depth,
            focal_px=f_new, rot_axis=axis, rot_deg=deg, translation=[0.0, 0.0, 0.0],
            seed=seed, hole_fraction_before_fill=1.0,
        )
        entries.append(entry)
        if load_error is not None:
            entry.status, entry.error = "failed", load_error
            continue
        try:
            spec = RecenteringSpec("y" if axis == "none" else axis, math.radians(deg), f_new, config.lateral)
            entry.translation = [float(c) for c in recentering_translation(cloud, K, spec)]
            sparse = splat(recenter(cloud, K, spec), K.with_focal(f_new))
            entry.hole_fraction_before_fill = sparse.hole_fraction
            dense = fill(sparse, seed)
            (out_root / _focal_dir(f_new)).mkdir(parents=True, exist_ok=True)
            entry.clamped_depth_pixels = save_rgbd(
                dense, out_root / rel_color, out_root / rel_depth, config.depth_scale
            )
        except (VflError, OSError) as exc:
            entry.status, entry.error = "failed", f"{type(exc).__name__}: {exc}"
            log.warning("%s at f=%g failed: %s", stem, f_new, exc)
    return entries


def run_transform(config: TransformConfig, workers: int = 1) -> DatasetManifest:
    pairs = discover_pairs(config.input_dir)
    if not pairs:
        raise InputError(f"no <stem>.png + <stem>{DEPTH_SUFFIX} pairs in {config.input_dir}")
    Path(config.output_dir).mkdir(parents=True, exist_ok=True)
    jobs = [(config, i, stem, c, d) for i, (stem, c, d) in enumerate(pairs)]
    if workers <= 1:
        results = [_process_frame(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_process_frame, jobs))

    manifest = DatasetManifest(config.public_dict())
    for entries in results:
        manifest.entries.extend(entries)
    manifest.write(Path(config.output_dir) / MANIFEST_NAME)
    log.info("wrote %d entries (%d failed)", len(manifest.entries), manifest.failed)
    return manifest


# -- evaluation ---------------------------------------------------------------

def _depth_files(directory) -> dict[str, Path]:
    root = Path(directory)
    files = {}
    tagged = sorted(root.glob("*" + DEPTH_SUFFIX))
    if tagged:
        for p in tagged:
            files[p.name[: -len(DEPTH_SUFFIX)]] = p
    else:
        for p in sorted(list(root.glob("*.png")) + list(root.glob("*.npy"))):
            files[p.stem] = p
    return files


@dataclass
class EvalResult:
    aggregate: MetricsReport
    per_frame: dict
    unmatched: list

    def to_dict(self) -> dict:
        return {
            "aggregate": self.aggregate.to_dict(),
            "per_frame": {k: v.to_dict() for k, v in self.per_frame.items()},
            "unmatched": self.unmatched,
        }

    def table(self) -> str:
        cols = ["rel", "rms", "log10", "delta1", "delta2", "delta3", "valid_pixel_count"]
        rows = [(stem, r) for stem, r in self.per_frame.items()] + [("ALL", self.aggregate)]
        width = max(len(s) for s, _ in rows)
        lines = [f"{'frame':<{width}}  " + "  ".join(f"{c:>10}" for c in cols)]
        for stem, r in rows:
            vals = [getattr(r, c) for c in cols]
            cells = [f"{v:>10d}" if isinstance(v, int) else f"{v:>10.4f}" for v in vals]
            lines.append(f"{stem:<{width}}  " + "  ".join(cells))
        return "\n".join(lines)


def run_eval(pred_dir, gt_dir, cap: float | None = None,
             depth_scale: float = DEFAULT_DEPTH_SCALE) -> EvalResult:
    """Per-frame metrics plus an aggregate pooled over every valid pixel."""
    preds, gts = _depth_files(pred_dir), _depth_files(gt_dir)
    stems = sorted(set(preds) & set(gts))
    unmatched = sorted(set(preds) ^ set(gts))
    if not stems:
        raise InputError(f"no matching depth files between {pred_dir} and {gt_dir}")
    per_frame, pooled_pred, pooled_gt = {}, [], []
    for stem in stems:
        pred = read_depth(preds[stem], depth_scale)
        gt = read_depth(gts[stem], depth_scale)
        try:
            per_frame[stem] = evaluate(pred, gt, cap)
        except EmptyEvaluationError:
            log.warning("%s has no valid ground truth; skipped", stem)
            continue
        mask = valid_mask(gt, cap)
        pooled_pred.append(pred[mask])
        pooled_gt.append(gt[mask])
    if not per_frame:
        raise EmptyEvaluationError("no frame has valid ground-truth pixels")
    aggregate = evaluate(np.concatenate(pooled_pred), np.concatenate(pooled_gt), cap)
    return EvalResult(aggregate, per_frame, unmatched)
