"""Block-level generation error via an integral image.

The block-level GE of a frame is the maximum, over every fully-contained
h x w window at stride 1, of the window-mean GE. The integral image makes
each window sum O(1), so a frame costs O(H*W) independent of block size.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BlockTooLarge
from .ge import GEMap


@dataclass(frozen=True)
class BlockSpec:
    """Height and width of the sliding block, in pixels."""

    height: int
    width: int

    def __post_init__(self):
        if self.height < 1 or self.width < 1:
            raise BlockTooLarge(f"block must be at least 1 x 1, got {self.height} x {self.width}")

    @property
    def area(self) -> int:
        return self.height * self.width


@dataclass(frozen=True)
class IntegralTable:
    """(H+1) x (W+1) grid of float64 prefix sums.

    Entry (i, j) is the sum of map values over rows [0, i) and columns [0, j);
    the first row and column are therefore zero.
    """

    values: np.ndarray

    def rectangle_sum(self, top: int, left: int, bottom: int, right: int) -> float:
        """Sum of map values over rows [top, bottom) x cols [left, right)."""
        t = self.values
        return float(t[bottom, right] - t[top, right] - t[bottom, left] + t[top, left])


@dataclass(frozen=True)
class BlockMeanGrid:
    """Mean GE of the h x w block anchored at each valid top-left position."""

    values: np.ndarray  # (H - h + 1) x (W - w + 1), float64
    block: BlockSpec


def integral_image(ge_map: GEMap) -> IntegralTable:
    table = np.zeros((ge_map.height + 1, ge_map.width + 1), dtype=np.float64)
    table[1:, 1:] = ge_map.values.cumsum(axis=0, dtype=np.float64).cumsum(axis=1)
    table.flags.writeable = False
    return IntegralTable(table)


def _check_fit(ge_map: GEMap, block: BlockSpec) -> None:
    if block.height > ge_map.height or block.width > ge_map.width:
        raise BlockTooLarge(
            f"block {block.height} x {block.width} exceeds frame "
            f"{ge_map.height} x {ge_map.width}"
        )


def block_means(ge_map: GEMap, block: BlockSpec) -> BlockMeanGrid:
    """Window-mean GE at every valid anchor, stride 1, no padding."""
    _check_fit(ge_map, block)
    t = integral_image(ge_map).values
    h, w = block.height, block.width
    sums = t[h:, w:] - t[:-h, w:] - t[h:, :-w] + t[:-h, :-w]
    # prefix-sum cancellation can leave tiny negatives on zero regions
    means = np.maximum(sums / block.area, 0.0)
    means.flags.writeable = False
    return BlockMeanGrid(means, block)


def block_level_ge(ge_map: GEMap, block: BlockSpec) -> float:
    """Maximum window-mean GE over the frame."""
    return float(block_means(ge_map, block).values.max())


def frame_level_ge(ge_map: GEMap) -> float:
    """Arithmetic mean GE over all pixels (the whole-frame baseline)."""
    return float(ge_map.values.mean(dtype=np.float64))
