from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vflgen.ambiguity import (
    PlaneScene,
    checkerboard,
    conjugate_depth,
    generate_pair,
    render_plane,
    reproject_view,
)
from vflgen.errors import InputError
from vflgen.geometry import Intrinsics

K = Intrinsics.centered(580.0, 48, 36)


def test_conjugate_same_focal():
    assert conjugate_depth(2.7, 580.0, 580.0) == 2.7


def test_conjugate_50_105():
    assert conjugate_depth(3.0, 50.0, 105.0) == 6.3


@given(st.floats(0.1, 100), st.floats(50, 2000), st.floats(50, 2000))
def test_conjugate_round_trip(d, f1, f2):
    assert conjugate_depth(conjugate_depth(d, f1, f2), f2, f1) == pytest.approx(d, rel=1e-15)


@pytest.mark.parametrize("args", [(0.0, 1.0, 1.0), (1.0, -1.0, 1.0), (1.0, 1.0, float("inf"))])
def test_conjugate_rejects_nonpositive(args):
    with pytest.raises(InputError):
        conjugate_depth(*args)


def test_same_focal_pair_identical():
    scene = PlaneScene(checkerboard(8, 8, 1), 0.05)
    pair = generate_pair(scene, 580.0, 580.0, 2.0, K)
    np.testing.assert_array_equal(pair.I1, pair.I2)
    np.testing.assert_array_equal(pair.Z1, pair.Z2)


def test_worked_pair():
    scene = PlaneScene(checkerboard(10, 12, 1), 0.005)
    pair = generate_pair(scene, 580.0, 700.0, 2.0, K)
    assert pair.D2 == pytest.approx(2.4138, abs=5e-5)
    assert pair.D2 == 700 * 2.0 / 580
    np.testing.assert_array_equal(pair.I1, pair.I2)
    hit = pair.Z1 > 0
    assert hit.any() and not hit.all()  # the checkerboard is smaller than the view
    np.testing.assert_array_equal(pair.Z2[hit], pair.D2)
    assert pair.record() == {"f1": 580.0, "f2": 700.0, "D1": 2.0, "D2": pair.D2}


def test_render_is_a_pinhole_image():
    # The centre pixel sees the texel at the plane centre; halving the depth doubles the footprint.
    tex = np.zeros((2, 2, 3), np.uint8)
    tex[1, 1] = 255
    near = render_plane(PlaneScene(tex, 1.0), K, 29.0)
    far = render_plane(PlaneScene(tex, 1.0), K, 58.0)
    assert near.valid.sum() == pytest.approx(4 * far.valid.sum(), rel=0.2)


def test_out_of_view():
    scene = PlaneScene(checkerboard(2, 2), 0.01, center=(50.0, 0.0))
    with pytest.raises(InputError):
        generate_pair(scene, 580.0, 600.0, 1.0, K)


def test_reprojection_agrees_with_rendering():
    rng = np.random.default_rng(1)
    scene = PlaneScene(rng.integers(0, 256, (200, 200, 3), dtype=np.uint8), 0.002)
    for f2 in (460.0, 500.0, 620.0, 700.0):
        pair = generate_pair(scene, 580.0, f2, 1.5, K)
        view = reproject_view(pair, K)
        assert not view.hole_mask.any()
        np.testing.assert_array_equal(view.color, pair.I2)
        np.testing.assert_allclose(view.depth, pair.Z2, rtol=1e-12)


@settings(max_examples=40, deadline=None)
@given(
    f1=st.floats(200, 1200), f2=st.floats(200, 1200), d1=st.floats(0.3, 30),
    cell=st.integers(1, 4), pitch=st.sampled_from([0.01, 0.025, 0.1, 0.3]),
)
def test_any_checkerboard_indistinguishable(f1, f2, d1, cell, pitch):
    scene = PlaneScene(checkerboard(24, 24, cell), pitch)
    try:
        pair = generate_pair(scene, f1, f2, d1, K)
    except InputError:
        return
    assert np.array_equal(pair.I1, pair.I2)
    ratio = Fraction(f2) / Fraction(f1)
    hit = pair.Z1 > 0
    assert all(z2 == float(ratio * Fraction(z1)) for z1, z2 in zip(pair.Z1[hit], pair.Z2[hit]))
