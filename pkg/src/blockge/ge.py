"""Generation-error maps computed from prediction / ground-truth frame pairs."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NegativeValue, NonFiniteInput


@dataclass(frozen=True)
class FrameImage:
    """H x W x C raster of finite float intensities (channel-interleaved)."""

    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float32)
        if values.ndim == 2:
            values = values[:, :, np.newaxis]
        if values.ndim != 3 or min(values.shape) < 1:
            raise DimensionMismatch(f"frame must be H x W x C, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise NonFiniteInput("frame contains NaN or infinite values")
        values = values.copy()
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def channels(self) -> int:
        return self.values.shape[2]


@dataclass(frozen=True)
class GEMap:
    """H x W raster of non-negative per-pixel generation errors.

    Values are stored as float32 so the GEM1 file format round-trips
    bit-exactly; arithmetic downstream is carried out in float64.
    """

    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float32)
        if values.ndim != 2 or min(values.shape) < 1:
            raise DimensionMismatch(f"GE map must be H x W, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise NonFiniteInput("GE map contains NaN or infinite values")
        if np.any(values < 0):
            raise NegativeValue("GE map contains negative values")
        values = values.copy()
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]


def compute_ge_map(pred: FrameImage, gt: FrameImage, exponent: int = 2) -> GEMap:
    """Per-pixel generation error: sum over channels of |pred - gt| ** exponent.

    The channel accumulation runs in float64 regardless of storage width.
    Mismatched shapes are an error, never an implicit resize.
    """
    if exponent not in (1, 2):
        raise ValueError(f"exponent must be 1 or 2, got {exponent}")
    if pred.values.shape != gt.values.shape:
        raise DimensionMismatch(
            f"prediction shape {pred.values.shape} != ground truth shape {gt.values.shape}"
        )
    diff = np.abs(pred.values.astype(np.float64) - gt.values.astype(np.float64))
    if exponent == 2:
        diff = diff * diff
    return GEMap(diff.sum(axis=2, dtype=np.float64))
