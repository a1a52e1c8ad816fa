import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vflgen.errors import EmptyEvaluationError, InputError
from vflgen.metrics import berhu_loss, berhu_values, evaluate, mse_loss


def naive_metrics(pred, gt, cap=None):
    """Plain per-pixel loops over valid ground truth."""
    n = abs_rel = sq = log_sum = 0.0
    n_log = 0
    hits = [0, 0, 0]
    for y, ys in zip(np.ravel(pred).tolist(), np.ravel(gt).tolist()):
        if not (math.isfinite(ys) and ys > 0) or (cap is not None and ys > cap):
            continue
        n += 1
        abs_rel += abs(y - ys) / ys
        sq += (y - ys) ** 2
        if y > 0:
            n_log += 1
            log_sum += abs(math.log10(y) - math.log10(ys))
            d = max(y / ys, ys / y)
            for k in range(3):
                hits[k] += d < 1.25 ** (k + 1)
    return {
        "rel": abs_rel / n, "rms": math.sqrt(sq / n), "log10": log_sum / n_log if n_log else math.nan,
        "delta1": hits[0] / n, "delta2": hits[1] / n, "delta3": hits[2] / n, "mse": sq / n,
    }


def naive_berhu(pred, gt):
    r = [y - ys for y, ys in zip(np.ravel(pred).tolist(), np.ravel(gt).tolist()) if ys > 0 and math.isfinite(ys)]
    c = 0.05 * max(abs(x) for x in r)
    vals = [abs(x) if abs(x) <= c else (x * x + c * c) / (2 * c) for x in r]
    return sum(vals) / len(vals)


def test_perfect_prediction():
    gt = np.array([[1.0, 2.0], [3.0, 4.0]])
    r = evaluate(gt, gt)
    assert (r.rel, r.rms, r.log10) == (0.0, 0.0, 0.0)
    assert (r.delta1, r.delta2, r.delta3) == (1.0, 1.0, 1.0)
    assert r.valid_pixel_count == 4


def test_threshold_is_strict():
    gt = np.array([1.0, 2.0, 4.0, 8.0])
    r = evaluate(1.25 * gt, gt)
    assert r.rel == pytest.approx(0.25, rel=1e-15)
    assert r.delta1 == 0.0
    assert r.delta2 == 1.0 and r.delta3 == 1.0


def test_worked_example():
    r = evaluate([2.0, 4.0], [1.0, 5.0])
    assert r.rel == pytest.approx(0.6, rel=1e-15)
    assert r.rms == 1.0
    assert r.log10 == pytest.approx(0.19897, abs=5e-6)
    assert r.log10 == pytest.approx((math.log10(2) + math.log10(5 / 4)) / 2, rel=1e-15)


def test_invalid_and_capped_pixels_ignored():
    gt = np.array([0.0, np.nan, 5.0, 80.0, -1.0])
    pred = np.array([9.0, 9.0, 5.0, 1.0, 9.0])
    r = evaluate(pred, gt, cap=70.0)
    assert r.valid_pixel_count == 1 and r.rel == 0.0


def test_nonpositive_prediction_is_reported():
    r = evaluate([0.0, -1.0, 2.0], [1.0, 1.0, 2.0])
    assert r.nonpositive_pred_count == 2
    assert r.log10 == 0.0
    assert r.delta3 == pytest.approx(1 / 3)
    assert r.rel == pytest.approx((1 + 2 + 0) / 3)


def test_empty_evaluation():
    with pytest.raises(EmptyEvaluationError):
        evaluate([1.0], [0.0])
    with pytest.raises(EmptyEvaluationError):
        mse_loss([1.0], [0.0])
    with pytest.raises(EmptyEvaluationError):
        berhu_loss([1.0], [np.nan])


def test_shape_mismatch():
    with pytest.raises(InputError):
        evaluate(np.ones(3), np.ones(4))


def test_report_json_fields():
    d = json.loads(json.dumps(evaluate([1.0], [1.0]).to_dict()))
    assert {"rel", "rms", "log10", "delta1", "delta2", "delta3", "valid_pixel_count"} <= set(d)


class TestMse:
    def test_identical(self):
        assert mse_loss([3.0, 4.0], [3.0, 4.0]) == 0.0

    def test_hand_value(self):
        assert mse_loss([1.0, 3.0], [1.0, 1.0]) == 2.0

    def test_homogeneity(self, rng):
        pred, gt = rng.uniform(0.1, 5, 50), rng.uniform(0.1, 5, 50)
        assert mse_loss(3.0 * pred, 3.0 * gt) == pytest.approx(9.0 * mse_loss(pred, gt), rel=1e-12)


class TestBerhu:
    def test_identical(self):
        assert berhu_loss([2.0, 3.0], [2.0, 3.0]) == 0.0

    def test_single_residual(self):
        assert berhu_loss([2.0], [1.0]) == pytest.approx(10.025, rel=1e-14)

    def test_two_residuals(self):
        assert berhu_loss([1.01, 2.0], [1.0, 1.0]) == pytest.approx(5.0175, rel=1e-12)
        np.testing.assert_allclose(berhu_values([0.01, 1.0]), [0.01, 10.025], rtol=1e-14)

    def test_continuity_at_threshold(self):
        c = 0.05 * 3.7
        quadratic = (c**2 + c**2) / (2 * c)
        assert abs(quadratic - c) <= 2 * np.finfo(float).eps * c
        vals = berhu_values([3.7, c, np.nextafter(c, 1.0), -c])
        assert vals[1] == c and vals[3] == c
        assert abs(vals[2] - c) <= 4 * np.finfo(float).eps * c

    @given(st.lists(st.floats(-100, 100, allow_nan=False), min_size=1, max_size=50))
    def test_dominates_l1(self, residuals):
        r = np.abs(np.array(residuals))
        vals = berhu_values(residuals)
        c = 0.05 * r.max()
        assert np.all(vals >= r - 1e-12 * np.maximum(r, 1))
        below = r <= c
        np.testing.assert_array_equal(vals[below], r[below])
        assert np.all(vals[~below] > r[~below] - 1e-12 * r[~below])


@settings(max_examples=100, deadline=None)
@given(h=st.integers(1, 16), w=st.integers(1, 16), seed=st.integers(0, 2**32 - 1))
def test_matches_naive(h, w, seed):
    rng = np.random.default_rng(seed)
    gt = rng.uniform(0.1, 20, (h, w))
    gt[rng.random((h, w)) < 0.2] = 0
    gt.flat[0] = max(gt.flat[0], 0.5)
    pred = gt * rng.uniform(0.5, 1.8, (h, w)) + rng.normal(0, 0.3, (h, w))
    pred = np.abs(pred) + 1e-3
    ref = naive_metrics(pred, gt)
    r = evaluate(pred, gt)
    for key in ("rel", "rms", "log10", "delta1", "delta2", "delta3"):
        assert getattr(r, key) == pytest.approx(ref[key], rel=1e-12, abs=1e-12)
    assert mse_loss(pred, gt) == pytest.approx(ref["mse"], rel=1e-12)
    assert berhu_loss(pred, gt) == pytest.approx(naive_berhu(pred, gt), rel=1e-12)


def test_permutation_and_scale(rng):
    gt = rng.uniform(0.5, 10, 200)
    pred = gt * rng.uniform(0.7, 1.4, 200)
    base = evaluate(pred, gt)
    perm = rng.permutation(200)
    shuffled = evaluate(pred[perm], gt[perm])
    for key in ("rel", "rms", "log10", "delta1", "delta2", "delta3"):
        assert getattr(shuffled, key) == pytest.approx(getattr(base, key), rel=1e-12)
    scaled = evaluate(2.5 * pred, 2.5 * gt)
    assert scaled.rms == pytest.approx(2.5 * base.rms, rel=1e-12)
    for key in ("rel", "log10"):
        assert getattr(scaled, key) == pytest.approx(getattr(base, key), rel=1e-12)
    assert (scaled.delta1, scaled.delta2, scaled.delta3) == (base.delta1, base.delta2, base.delta3)
