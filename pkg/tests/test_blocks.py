import numpy as np
import pytest

from blockge import (
    BlockSpec,
    GEMap,
    block_level_ge,
    block_means,
    frame_level_ge,
    integral_image,
)
from blockge.errors import BlockTooLarge


def gmap(arr):
    return GEMap(np.asarray(arr, dtype=np.float32))


def brute_means(values, h, w):
    """Quadruple-loop sliding-window means."""
    H, W = values.shape
    out = np.zeros((H - h + 1, W - w + 1))
    for r in range(H - h + 1):
        for c in range(W - w + 1):
            total = 0.0
            for i in range(h):
                for j in range(w):
                    total += float(values[r + i, c + j])
            out[r, c] = total / (h * w)
    return out


class TestIntegralImage:
    def test_zero_map(self):
        table = integral_image(gmap(np.zeros((4, 4))))
        assert not table.values.any()

    def test_full_rectangle_of_ones(self):
        table = integral_image(gmap(np.ones((3, 3))))
        assert table.values[3, 3] == 9.0

    def test_first_row_and_column_zero(self):
        rng = np.random.default_rng(1)
        table = integral_image(gmap(rng.random((5, 7))))
        assert not table.values[0, :].any()
        assert not table.values[:, 0].any()

    def test_monotone_rows_and_columns(self):
        rng = np.random.default_rng(2)
        t = integral_image(gmap(rng.random((8, 8)))).values
        assert (np.diff(t, axis=0) >= 0).all()
        assert (np.diff(t, axis=1) >= 0).all()

    def test_random_rectangles_match_double_loop(self):
        rng = np.random.default_rng(3)
        values = rng.random((16, 16)).astype(np.float32)
        table = integral_image(gmap(values))
        for _ in range(100):
            r0, r1 = sorted(rng.integers(0, 17, size=2))
            c0, c1 = sorted(rng.integers(0, 17, size=2))
            if r0 == r1 or c0 == c1:
                continue
            direct = sum(
                float(values[i, j]) for i in range(r0, r1) for j in range(c0, c1)
            )
            got = table.rectangle_sum(r0, c0, r1, c1)
            assert got == pytest.approx(direct, rel=1e-6)


class TestBlockMeans:
    def test_constant_map(self):
        grid = block_means(gmap(np.full((6, 6), 2.5)), BlockSpec(3, 2)).values
        assert grid.shape == (4, 5)
        np.testing.assert_allclose(grid, 2.5, rtol=1e-12)

    def test_full_frame_block_is_single_cell(self):
        rng = np.random.default_rng(4)
        m = gmap(rng.random((5, 8)))
        grid = block_means(m, BlockSpec(5, 8)).values
        assert grid.shape == (1, 1)
        assert grid[0, 0] == pytest.approx(frame_level_ge(m), rel=1e-12)

    def test_matches_quadruple_loop(self):
        rng = np.random.default_rng(5)
        values = rng.random((32, 32)).astype(np.float32)
        got = block_means(gmap(values), BlockSpec(5, 7)).values
        want = brute_means(values, 5, 7)
        np.testing.assert_allclose(got, want, rtol=1e-5)

    def test_too_large_raises(self):
        m = gmap(np.zeros((4, 4)))
        with pytest.raises(BlockTooLarge):
            block_means(m, BlockSpec(5, 1))
        with pytest.raises(BlockTooLarge):
            block_means(m, BlockSpec(1, 5))

    def test_non_negative_even_on_zero_regions(self):
        values = np.zeros((20, 20), dtype=np.float32)
        values[15:, 15:] = 1000.0
        grid = block_means(gmap(values), BlockSpec(3, 3)).values
        assert (grid >= 0).all()


class TestBlockLevelGE:
    def test_one_by_one_is_pixel_max(self):
        rng = np.random.default_rng(6)
        values = rng.random((12, 9)).astype(np.float32)
        got = block_level_ge(gmap(values), BlockSpec(1, 1))
        assert got == pytest.approx(float(values.max()), abs=1e-9)

    def test_full_frame_is_frame_mean(self):
        rng = np.random.default_rng(7)
        m = gmap(rng.random((10, 11)))
        got = block_level_ge(m, BlockSpec(10, 11))
        assert got == pytest.approx(frame_level_ge(m), abs=1e-9)

    def test_interior_patch_value(self):
        # 10x10 patch of 1.0 fully interior on a 64x64 zero map; the best
        # 30x30 window contains the whole patch: 100 / 900
        values = np.zeros((64, 64), dtype=np.float32)
        values[20:30, 25:35] = 1.0
        got = block_level_ge(gmap(values), BlockSpec(30, 30))
        assert got == pytest.approx(100.0 / 900.0, rel=1e-9)
        want = brute_means(values, 30, 30).max()
        assert got == pytest.approx(want, rel=1e-9)

    def test_bounds_by_pixel_max(self):
        rng = np.random.default_rng(8)
        values = rng.random((20, 20)).astype(np.float32)
        peak = float(values.max())
        for h, w in ((2, 3), (5, 5), (8, 1)):
            got = block_level_ge(gmap(values), BlockSpec(h, w))
            assert peak / (h * w) - 1e-12 <= got <= peak + 1e-12

    def test_translation_covariance(self):
        base = np.zeros((40, 40), dtype=np.float32)
        rng = np.random.default_rng(9)
        patch = rng.random((6, 6)).astype(np.float32)
        block = BlockSpec(8, 8)
        reference = None
        for dr, dc in ((10, 10), (12, 15), (18, 9)):
            values = base.copy()
            values[dr : dr + 6, dc : dc + 6] = patch
            got = block_level_ge(gmap(values), block)
            if reference is None:
                reference = got
            assert got == pytest.approx(reference, abs=1e-9)

    def test_scaling_equivariance(self):
        rng = np.random.default_rng(10)
        values = rng.random((16, 16)).astype(np.float32)
        block = BlockSpec(4, 6)
        base = block_level_ge(gmap(values), block)
        for alpha in (0.0, 0.5, 3.0):
            got = block_level_ge(gmap(alpha * values), block)
            assert got == pytest.approx(alpha * base, rel=1e-9, abs=1e-15)


class TestFrameLevelGE:
    def test_zero_map(self):
        assert frame_level_ge(gmap(np.zeros((4, 4)))) == 0.0

    def test_small_case(self):
        assert frame_level_ge(gmap([[0, 1], [2, 3]])) == pytest.approx(1.5)

    def test_equals_degenerate_block(self):
        rng = np.random.default_rng(11)
        m = gmap(rng.random((64, 64)))
        assert frame_level_ge(m) == pytest.approx(
            block_level_ge(m, BlockSpec(64, 64)), abs=1e-9
        )


def test_oracle_equivalence_over_block_grid():
    rng = np.random.default_rng(12)
    values = rng.random((64, 64)).astype(np.float32)
    m = gmap(values)
    windows = np.lib.stride_tricks.sliding_window_view
    for h in (1, 3, 8, 16):
        for w in (1, 5, 16):
            got = block_means(m, BlockSpec(h, w)).values
            want = windows(values.astype(np.float64), (h, w)).mean(axis=(2, 3))
            np.testing.assert_allclose(got, want, rtol=1e-5)
