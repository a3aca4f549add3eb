import numpy as np
import pytest

from blockge import FrameImage, GEMap, compute_ge_map
from blockge.errors import DimensionMismatch, NegativeValue, NonFiniteInput


def frame(arr):
    return FrameImage(np.asarray(arr, dtype=np.float32))


def ge_oracle(pred, gt, p):
    """Independent per-pixel triple loop."""
    h, w, c = pred.shape
    out = np.zeros((h, w))
    for i in range(h):
        for j in range(w):
            for k in range(c):
                out[i, j] += abs(float(pred[i, j, k]) - float(gt[i, j, k])) ** p
    return out


class TestFrameImage:
    def test_promotes_2d_to_single_channel(self):
        f = frame(np.zeros((4, 5)))
        assert (f.height, f.width, f.channels) == (4, 5, 1)

    def test_rejects_nan(self):
        with pytest.raises(NonFiniteInput):
            frame([[[np.nan]]])

    def test_values_are_read_only(self):
        f = frame(np.ones((2, 2, 3)))
        with pytest.raises(ValueError):
            f.values[0, 0, 0] = 5.0


class TestGEMap:
    def test_rejects_negative(self):
        with pytest.raises(NegativeValue):
            GEMap(np.array([[-1.0, 0.0]]))

    def test_rejects_inf(self):
        with pytest.raises(NonFiniteInput):
            GEMap(np.array([[np.inf]]))

    def test_rejects_wrong_rank(self):
        with pytest.raises(DimensionMismatch):
            GEMap(np.zeros(4))


class TestComputeGEMap:
    def test_identical_frames_give_zero(self):
        rng = np.random.default_rng(0)
        a = frame(rng.random((6, 7, 3)))
        for p in (1, 2):
            assert not compute_ge_map(a, a, p).values.any()

    def test_single_pixel_squared_error(self):
        e = compute_ge_map(frame([[[0.5]]]), frame([[[0.2]]]), 2)
        assert e.values[0, 0] == pytest.approx(0.09, abs=1e-9)

    def test_matches_triple_loop_oracle(self):
        rng = np.random.default_rng(42)
        pred = rng.random((8, 8, 3)).astype(np.float32)
        gt = rng.random((8, 8, 3)).astype(np.float32)
        for p in (1, 2):
            got = compute_ge_map(frame(pred), frame(gt), p).values
            want = ge_oracle(pred, gt, p)
            np.testing.assert_allclose(got, want, atol=1e-6)

    def test_symmetry_is_exact(self):
        rng = np.random.default_rng(7)
        a = frame(rng.random((5, 9, 2)))
        b = frame(rng.random((5, 9, 2)))
        for p in (1, 2):
            ab = compute_ge_map(a, b, p).values
            ba = compute_ge_map(b, a, p).values
            assert np.array_equal(ab, ba)

    def test_non_negative(self):
        rng = np.random.default_rng(3)
        a = frame(rng.standard_normal((4, 4, 3)))
        b = frame(rng.standard_normal((4, 4, 3)))
        assert (compute_ge_map(a, b, 1).values >= 0).all()

    def test_channel_sum_decomposition(self):
        rng = np.random.default_rng(11)
        pred = rng.random((6, 6, 4)).astype(np.float32)
        gt = rng.random((6, 6, 4)).astype(np.float32)
        full = compute_ge_map(frame(pred), frame(gt), 2).values.astype(np.float64)
        parts = sum(
            compute_ge_map(frame(pred[:, :, c]), frame(gt[:, :, c]), 2).values.astype(np.float64)
            for c in range(4)
        )
        np.testing.assert_allclose(full, parts, atol=1e-6)

    def test_zero_iff_equal(self):
        pred = np.zeros((3, 3, 1), dtype=np.float32)
        gt = pred.copy()
        gt[1, 2, 0] = 1e-4
        e = compute_ge_map(frame(pred), frame(gt), 2).values
        assert e[1, 2] > 0
        assert (e == 0).sum() == 8

    def test_shape_mismatch_raises(self):
        with pytest.raises(DimensionMismatch):
            compute_ge_map(frame(np.zeros((2, 2, 1))), frame(np.zeros((2, 3, 1))), 2)

    def test_bad_exponent_rejected(self):
        a = frame(np.zeros((1, 1, 1)))
        with pytest.raises(ValueError):
            compute_ge_map(a, a, 3)
