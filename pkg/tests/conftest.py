import numpy as np
import pytest

from vflgen.geometry import Intrinsics, RgbdFrame

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_frame(rng, width, height, zmin=0.5, zmax=10.0, hole_fraction=0.0):
    color = rng.integers(0, 256, size=(height, width, 3), dtype=np.uint8)
    depth = rng.uniform(zmin, zmax, size=(height, width))
    if hole_fraction:
        depth[rng.random((height, width)) < hole_fraction] = 0.0
    return RgbdFrame(color, depth)


@pytest.fixture
def small_K():
    return Intrinsics.centered(580.0, 64, 48)
