"""Command-line front end: ``vflgen {transform,eval,rf,ambiguity,synth}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .ambiguity import PlaneScene, checkerboard, generate_pair
from .errors import VflError
from .geometry import Intrinsics, RgbdFrame, load_presets
from .pipeline import DEFAULT_FOCALS, NYU_FOCAL, TransformConfig, run_eval, run_transform
from .receptive_field import count_map, load_architecture, theoretical_rf_size
from .rgbd_io import DEFAULT_DEPTH_SCALE, read_color, save_rgbd
from .synthetic import BUNDLED_COUNT, BUNDLED_SEED, synthetic_frames, write_corpus


def _rot_deg(text: str):
    return text if text == "uniform" else float(text)


def cmd_transform(args) -> int:
    fields = {
        "input_dir": args.input_dir,
        "output_dir": args.output_dir,
        "focals": args.focals,
        "source_focal": args.source_focal,
        "rot_axis": args.rot_axis,
        "rot_deg": args.rot_deg,
        "seed": args.seed,
        "depth_scale": args.depth_scale,
        "lateral": args.lateral,
        "share_rotation": args.share_rotation or None,
    }
    if args.config:
        config = TransformConfig.from_json(args.config, **fields)
    else:
        defaults = {"focals": DEFAULT_FOCALS, "source_focal": NYU_FOCAL, "rot_axis": "none", "rot_deg": 0.0,
                    "seed": 0, "depth_scale": DEFAULT_DEPTH_SCALE, "lateral": "per-point", "share_rotation": False}
        if not (args.input_dir and args.output_dir):
            raise SystemExit("transform: --input-dir and --output-dir are required without --config")
        config = TransformConfig(**{k: (defaults.get(k) if v is None else v) for k, v in fields.items()})
    manifest = run_transform(config, workers=args.workers)
    print(f"{len(manifest.entries)} outputs, {manifest.failed} failed -> {config.output_dir}")
    return 1 if manifest.failed else 0


def cmd_eval(args) -> int:
    cap = args.cap
    if cap is None and args.preset:
        cap = load_presets()[args.preset]["depth_cap"]
    result = run_eval(args.pred_dir, args.gt_dir, cap, args.depth_scale)
    print(result.table())
    if result.unmatched:
        print("unmatched: " + ", ".join(result.unmatched), file=sys.stderr)
    if args.json:
        Path(args.json).write_text(json.dumps(result.to_dict(), indent=2) + "\n")
    return 0


def cmd_rf(args) -> int:
    arch = load_architecture(args.arch)
    cmap = count_map(arch, tuple(args.node), tuple(args.input_size) if args.input_size else None)
    print(f"theoretical receptive field {theoretical_rf_size(arch)}, support {cmap.bounding_box()}, "
          f"centre count {cmap.counts.max()}, total {cmap.total}")
    if args.csv:
        cmap.to_csv(args.csv)
    if args.pgm:
        cmap.to_pgm(args.pgm)
    return 0


def cmd_ambiguity(args) -> int:
    if args.texture:
        texture = read_color(args.texture)
    else:
        texture = checkerboard(args.checker_rows, args.checker_cols, colors=((230, 200, 40), (30, 60, 160)))
    scene = PlaneScene(texture, args.pitch)
    K = Intrinsics.centered(args.f1, args.width, args.height)
    pair = generate_pair(scene, args.f1, args.f2, args.d1, K)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_rgbd(RgbdFrame(pair.I1, pair.Z1), out / "view1.png", out / "view1_depth.png", args.depth_scale)
    save_rgbd(RgbdFrame(pair.I2, pair.Z2), out / "view2.png", out / "view2_depth.png", args.depth_scale)
    (out / "pair.json").write_text(json.dumps(pair.record(), indent=2) + "\n")
    same = np.array_equal(pair.I1, pair.I2)
    print(f"D2 = {pair.D2:.6g} m; images identical: {same}")
    return 0


def cmd_synth(args) -> int:
    frames = synthetic_frames(args.count, args.width, args.height, args.focal, args.seed)
    paths = write_corpus(args.out_dir, frames, args.depth_scale)
    print(f"wrote {len(paths)} RGB-D pairs to {args.out_dir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vflgen", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("transform", help="generate varying-focal-length RGB-D sets")
    p.add_argument("--config", help="JSON file with TransformConfig fields; flags override it")
    p.add_argument("--input-dir")
    p.add_argument("--output-dir")
    p.add_argument("--focals", type=float, nargs="+")
    p.add_argument("--source-focal", type=float)
    p.add_argument("--rot-axis", choices=["x", "y", "none"])
    p.add_argument("--rot-deg", type=_rot_deg, help="degrees in [-5, 5] or 'uniform'")
    p.add_argument("--seed", type=int)
    p.add_argument("--depth-scale", type=float)
    p.add_argument("--lateral", choices=["per-point", "mean"])
    p.add_argument("--share-rotation", action="store_true",
                   help="with --rot-deg uniform, draw one angle per frame instead of per focal")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("eval", help="depth metrics between two directories")
    p.add_argument("--pred-dir", required=True)
    p.add_argument("--gt-dir", required=True)
    p.add_argument("--cap", type=float, help="ignore ground truth beyond this many metres")
    p.add_argument("--preset", choices=sorted(load_presets()), help="take the depth cap from a preset")
    p.add_argument("--depth-scale", type=float, default=DEFAULT_DEPTH_SCALE)
    p.add_argument("--json", help="write the full report here")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("rf", help="receptive-field count map")
    p.add_argument("--arch", required=True, help="JSON list of {kind, kernel, stride, padding}")
    p.add_argument("--node", type=int, nargs=2, default=(0, 0), metavar=("ROW", "COL"))
    p.add_argument("--input-size", type=int, nargs=2, metavar=("ROWS", "COLS"))
    p.add_argument("--csv")
    p.add_argument("--pgm")
    p.set_defaults(func=cmd_rf)

    p = sub.add_parser("ambiguity", help="render an indistinguishable focal/depth pair")
    p.add_argument("--f1", type=float, default=580.0)
    p.add_argument("--f2", type=float, default=700.0)
    p.add_argument("--d1", type=float, default=2.0)
    p.add_argument("--width", type=int, default=320)
    p.add_argument("--height", type=int, default=240)
    p.add_argument("--texture", help="8-bit RGB PNG; defaults to a checkerboard")
    p.add_argument("--checker-rows", type=int, default=12)
    p.add_argument("--checker-cols", type=int, default=16)
    p.add_argument("--pitch", type=float, default=0.25, help="texel size in metres")
    p.add_argument("--depth-scale", type=float, default=DEFAULT_DEPTH_SCALE)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_ambiguity)

    p = sub.add_parser("synth", help="write the procedural RGB-D corpus")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--count", type=int, default=BUNDLED_COUNT)
    p.add_argument("--width", type=int, default=640)
    p.add_argument("--height", type=int, default=480)
    p.add_argument("--focal", type=float, default=NYU_FOCAL)
    p.add_argument("--seed", type=int, default=BUNDLED_SEED)
    p.add_argument("--depth-scale", type=float, default=DEFAULT_DEPTH_SCALE)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except VflError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
