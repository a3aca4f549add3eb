import numpy as np
import pytest

from blockge import (
    FusionWeights,
    LabelSeries,
    NormalizationMode,
    ScoreSeries,
    fuse,
    normalize,
    roc_auc,
)
from blockge.errors import EmptySeries, ShapeMismatch


def series(*parts):
    return ScoreSeries.from_segments(list(parts))


class TestNormalize:
    def test_simple_affine_both_modes(self):
        s = series(("a", [2.0, 4.0, 6.0]))
        for mode in NormalizationMode:
            out, flags = normalize(s, mode)
            np.testing.assert_allclose(out.values, [0.0, 0.5, 1.0])
            assert flags == ()

    def test_two_segment_modes_differ(self):
        s = series(("a", [0.0, 10.0]), ("b", [0.0, 1.0]))
        dataset, _ = normalize(s, NormalizationMode.DATASET)
        np.testing.assert_allclose(dataset.values, [0.0, 1.0, 0.0, 0.1])
        video, _ = normalize(s, NormalizationMode.PER_VIDEO)
        np.testing.assert_allclose(video.values, [0.0, 1.0, 0.0, 1.0])

    def test_degenerate_segment_flagged_zeroed(self):
        s = series(("a", [5.0, 5.0]), ("b", [1.0, 2.0]))
        out, flags = normalize(s, NormalizationMode.PER_VIDEO)
        assert flags == ("a",)
        np.testing.assert_array_equal(out.values[:2], [0.0, 0.0])
        np.testing.assert_allclose(out.values[2:], [0.0, 1.0])

    def test_degenerate_dataset_flagged(self):
        s = series(("a", [3.0, 3.0]))
        out, flags = normalize(s, NormalizationMode.DATASET)
        assert flags == ("dataset",)
        assert not out.values.any()

    def test_outputs_in_unit_interval(self):
        rng = np.random.default_rng(0)
        s = series(("a", rng.standard_normal(100)), ("b", rng.standard_normal(50)))
        for mode in NormalizationMode:
            out, _ = normalize(s, mode)
            assert out.values.min() >= 0.0
            assert out.values.max() <= 1.0

    def test_per_video_attains_both_bounds(self):
        rng = np.random.default_rng(1)
        s = series(("a", rng.random(20)), ("b", rng.random(30)))
        out, flags = normalize(s, NormalizationMode.PER_VIDEO)
        assert flags == ()
        for seg, vals in out.iter_segments():
            assert vals.min() == 0.0
            assert vals.max() == 1.0

    def test_dataset_mode_preserves_global_ordering(self):
        rng = np.random.default_rng(2)
        s = series(("a", rng.random(40)), ("b", rng.random(40)))
        out, _ = normalize(s, NormalizationMode.DATASET)
        assert np.array_equal(np.argsort(s.values), np.argsort(out.values))

    def test_dataset_mode_keeps_auc_exactly(self):
        rng = np.random.default_rng(3)
        values = rng.random(200)
        labels_arr = (rng.random(200) < 0.3).astype(int)
        labels_arr[0] = 1
        labels_arr[1] = 0
        s = series(("a", values))
        labels = LabelSeries.from_segments([("a", labels_arr)])
        out, _ = normalize(s, NormalizationMode.DATASET)
        assert roc_auc(out, labels) == roc_auc(s, labels)

    def test_empty_series_rejected(self):
        with pytest.raises(EmptySeries):
            normalize(ScoreSeries(np.empty(0), ()), NormalizationMode.DATASET)


class TestFuse:
    def test_single_series_weight_one_is_identity(self):
        s = series(("a", [1.0, 2.0, 3.0]))
        out = fuse([s])
        np.testing.assert_array_equal(out.values, s.values)

    def test_two_equal_series_double(self):
        s = series(("a", [1.0, 2.0]))
        out = fuse([s, s])
        np.testing.assert_array_equal(out.values, [2.0, 4.0])

    def test_pixel_plus_flow_configuration(self):
        rng = np.random.default_rng(4)
        pixel = series(("a", rng.random(50)))
        flow = series(("a", rng.random(50)))
        weights = FusionWeights((("pixel", 1.0), ("flow", 1.0)))
        out = fuse([pixel, flow], weights)
        want = np.array([p + f for p, f in zip(pixel.values, flow.values)])
        np.testing.assert_allclose(out.values, want, rtol=1e-12)

    def test_linearity(self):
        rng = np.random.default_rng(5)
        a = series(("a", rng.random(20)))
        b = series(("a", rng.random(20)))
        w = FusionWeights((("a", 2.0), ("b", 0.5)))
        scaled = fuse([a.with_values(3.0 * a.values), b.with_values(3.0 * b.values)], w)
        base = fuse([a, b], w)
        np.testing.assert_allclose(scaled.values, 3.0 * base.values, rtol=1e-12)

    def test_structure_mismatch_rejected(self):
        a = series(("a", [1.0, 2.0]))
        b = series(("b", [1.0, 2.0]))
        with pytest.raises(ShapeMismatch):
            fuse([a, b])

    def test_weight_count_mismatch_rejected(self):
        a = series(("a", [1.0]))
        with pytest.raises(ShapeMismatch):
            fuse([a], FusionWeights((("x", 1.0), ("y", 1.0))))

    def test_negative_weight_rejected(self):
        with pytest.raises(ShapeMismatch):
            FusionWeights((("x", -0.1),))

    def test_empty_weights_rejected(self):
        with pytest.raises(ShapeMismatch):
            FusionWeights(())
