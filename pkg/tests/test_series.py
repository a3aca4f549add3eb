import numpy as np
import pytest

from blockge import LabelSeries, ScoreSeries, Segment, median_filter
from blockge.errors import LabelOutOfRange, NonFiniteInput, ShapeMismatch


def median_oracle(values, radius):
    """Naive sort-per-window median with shrinking edges."""
    n = len(values)
    out = np.empty(n)
    for t in range(n):
        window = sorted(values[max(0, t - radius) : min(n, t + radius + 1)])
        m = len(window)
        if m % 2:
            out[t] = window[m // 2]
        else:
            out[t] = (window[m // 2 - 1] + window[m // 2]) / 2.0
    return out


class TestScoreSeries:
    def test_from_segments_assigns_offsets(self):
        s = ScoreSeries.from_segments([("a", [1.0, 2.0]), ("b", [3.0])])
        assert s.segments == (Segment("a", 0, 2), Segment("b", 2, 1))
        np.testing.assert_array_equal(s.values, [1.0, 2.0, 3.0])

    def test_segments_must_cover_exactly(self):
        with pytest.raises(ShapeMismatch):
            ScoreSeries(np.zeros(3), (Segment("a", 0, 2),))
        with pytest.raises(ShapeMismatch):
            ScoreSeries(np.zeros(3), (Segment("a", 1, 2),))

    def test_rejects_nan(self):
        with pytest.raises(NonFiniteInput):
            ScoreSeries.from_segments([("a", [np.nan])])

    def test_segment_views(self):
        s = ScoreSeries.from_segments([("a", [1.0, 2.0]), ("b", [5.0, 6.0, 7.0])])
        seg_b = s.segments[1]
        np.testing.assert_array_equal(s.segment_values(seg_b), [5.0, 6.0, 7.0])

    def test_structure_comparison(self):
        a = ScoreSeries.from_segments([("a", [1.0]), ("b", [2.0])])
        b = LabelSeries.from_segments([("a", [0]), ("b", [1])])
        c = LabelSeries.from_segments([("a", [0, 1])])
        assert a.same_structure(b)
        assert not a.same_structure(c)


class TestLabelSeries:
    def test_rejects_out_of_range(self):
        with pytest.raises(LabelOutOfRange):
            LabelSeries.from_segments([("a", [0, 2])])

    def test_accepts_binary(self):
        s = LabelSeries.from_segments([("a", [0, 1, 1, 0])])
        assert s.values.dtype == np.int8


class TestMedianFilter:
    def test_radius_zero_is_identity(self):
        s = ScoreSeries.from_segments([("a", [3.0, 1.0, 2.0])])
        out = median_filter(s, 0)
        np.testing.assert_array_equal(out.values, s.values)

    def test_constant_segment_unchanged(self):
        s = ScoreSeries.from_segments([("a", np.full(50, 4.2))])
        out = median_filter(s, 15)
        np.testing.assert_array_equal(out.values, s.values)

    def test_matches_sort_oracle_r15(self):
        rng = np.random.default_rng(0)
        values = rng.random(200)
        s = ScoreSeries.from_segments([("a", values)])
        out = median_filter(s, 15)
        np.testing.assert_array_equal(out.values, median_oracle(values, 15))

    @pytest.mark.parametrize("n,radius", [(1, 3), (2, 1), (5, 2), (31, 15), (40, 20)])
    def test_matches_oracle_small_cases(self, n, radius):
        rng = np.random.default_rng(n * 100 + radius)
        values = rng.integers(0, 5, size=n).astype(float)  # force ties
        s = ScoreSeries.from_segments([("a", values)])
        out = median_filter(s, radius)
        np.testing.assert_array_equal(out.values, median_oracle(values, radius))

    def test_never_crosses_segments(self):
        a = np.zeros(10)
        b = np.full(10, 100.0)
        s = ScoreSeries.from_segments([("a", a), ("b", b)])
        out = median_filter(s, 4)
        np.testing.assert_array_equal(out.values[:10], a)
        np.testing.assert_array_equal(out.values[10:], b)

    def test_segment_isolation(self):
        rng = np.random.default_rng(1)
        a = rng.random(30)
        b = rng.random(25)
        base = median_filter(ScoreSeries.from_segments([("a", a), ("b", b)]), 5)
        perturbed = median_filter(
            ScoreSeries.from_segments([("a", a), ("b", b + 10.0)]), 5
        )
        np.testing.assert_array_equal(base.values[:30], perturbed.values[:30])

    def test_output_within_segment_range(self):
        rng = np.random.default_rng(2)
        values = rng.standard_normal(77)
        s = ScoreSeries.from_segments([("a", values)])
        out = median_filter(s, 9).values
        assert out.min() >= values.min()
        assert out.max() <= values.max()

    def test_even_edge_window_averages_two_middles(self):
        # t=0, radius 1 on [1, 5, ...] -> window {1, 5} -> 3.0
        s = ScoreSeries.from_segments([("a", [1.0, 5.0, 2.0, 2.0])])
        out = median_filter(s, 1)
        assert out.values[0] == 3.0

    def test_idempotent_on_constants(self):
        s = ScoreSeries.from_segments([("a", np.full(20, 7.0))])
        once = median_filter(s, 3)
        twice = median_filter(once, 3)
        np.testing.assert_array_equal(once.values, twice.values)

    def test_negative_radius_rejected(self):
        s = ScoreSeries.from_segments([("a", [1.0])])
        with pytest.raises(ValueError):
            median_filter(s, -1)
