"""Per-pixel usage counts of one output node through a stack of window layers.

Weights and activations play no part: every layer is a sliding window that
reads each input position inside it once, so the count at an input pixel is
the number of distinct computation paths linking it to the output node.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from PIL import Image

from .errors import InputError


@dataclass(frozen=True)
class LayerSpec:
    kind: str
    kernel: int
    stride: int = 1
    padding: int = 0

    def __post_init__(self):
        if self.kind not in ("conv", "pool"):
            raise InputError(f"layer kind must be 'conv' or 'pool', got {self.kind!r}")
        if self.kernel < 1 or self.stride < 1 or self.padding < 0:
            raise InputError(f"invalid layer geometry: {self}")

    def output_size(self, n: int) -> int:
        return (n + 2 * self.padding - self.kernel) // self.stride + 1


@dataclass(frozen=True)
class CountMap:
    counts: np.ndarray  # (rows, cols) int64
    anchor: tuple[int, int]  # input (row, col) of counts[0, 0]

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def bounding_box(self) -> tuple[int, int]:
        rows = np.flatnonzero(self.counts.any(axis=1))
        cols = np.flatnonzero(self.counts.any(axis=0))
        if rows.size == 0:
            return (0, 0)
        return (int(rows[-1] - rows[0] + 1), int(cols[-1] - cols[0] + 1))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["# anchor_row", self.anchor[0], "anchor_col", self.anchor[1]])
            writer.writerows(self.counts.tolist())

    def heatmap(self) -> np.ndarray:
        peak = self.counts.max()
        if peak == 0:
            return np.zeros(self.counts.shape, dtype=np.uint8)
        return np.rint(self.counts * (255.0 / peak)).astype(np.uint8)

    def to_pgm(self, path) -> None:
        Image.fromarray(self.heatmap()).save(path, format="PPM")


def theoretical_rf_size(arch: Sequence[LayerSpec]) -> int:
    size, jump = 1, 1
    for layer in arch:
        size += (layer.kernel - 1) * jump
        jump *= layer.stride
    return size


def plane_sizes(arch: Sequence[LayerSpec], n: int) -> list[int]:
    """Sizes of every plane along one axis, input first."""
    sizes = [n]
    for layer in arch:
        n = layer.output_size(n)
        if n < 1:
            raise InputError(f"input of size {sizes[0]} collapses to nothing at {layer}")
        sizes.append(n)
    return sizes


def _counts_1d(arch: Sequence[LayerSpec], node: int, sizes: list[int] | None) -> tuple[np.ndarray, int]:
    counts = np.ones(1, dtype=np.int64)
    origin = node
    for depth in range(len(arch) - 1, -1, -1):
        layer = arch[depth]
        k, s = layer.kernel, layer.stride
        back = np.zeros((counts.size - 1) * s + k, dtype=np.int64)
        for j in range(k):
            back[j : j + (counts.size - 1) * s + 1 : s] += counts
        counts, origin = back, origin * s - layer.padding
        if sizes is not None:
            lo = max(0, -origin)
            hi = min(counts.size, sizes[depth] - origin)
            counts, origin = counts[lo:hi], origin + lo
    return counts, origin


def count_map(
    arch: Sequence[LayerSpec],
    output_node: tuple[int, int],
    input_size: tuple[int, int] | None = None,
) -> CountMap:
    """Count map over the input plane for ``output_node`` = (row, col).

    With ``input_size`` = (rows, cols), windows are truncated at the input
    border and reads of padding are dropped. Without it the planes are taken
    as unbounded, which is the interior-node case.
    """
    arch = list(arch)
    if not arch:
        raise InputError("architecture must have at least one layer")
    row, col = (int(x) for x in output_node)
    sizes = [None, None]
    if input_size is not None:
        sizes = [plane_sizes(arch, int(n)) for n in input_size]
        out_rows, out_cols = sizes[0][-1], sizes[1][-1]
        if not (0 <= row < out_rows and 0 <= col < out_cols):
            raise InputError(f"output node {output_node} outside the {out_rows}x{out_cols} output plane")
    elif row < 0 or col < 0:
        raise InputError(f"output node {output_node} has a negative coordinate")

    rc, r0 = _counts_1d(arch, row, sizes[0])
    cc, c0 = _counts_1d(arch, col, sizes[1])
    return CountMap(np.outer(rc, cc), (r0, c0))


def load_architecture(path) -> list[LayerSpec]:
    """Read layer records from JSON; fully connected records are skipped."""
    data = json.loads(Path(path).read_text())
    records = data["layers"] if isinstance(data, dict) else data
    layers = []
    for rec in records:
        if rec.get("kind") == "fc":
            continue
        layers.append(
            LayerSpec(rec["kind"], int(rec["kernel"]), int(rec.get("stride", 1)), int(rec.get("padding", 0)))
        )
    return layers
