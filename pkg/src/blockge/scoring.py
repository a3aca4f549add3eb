"""Min-max score normalization and weighted fusion of score series."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ShapeMismatch
from .series import ScoreSeries, require_nonempty


class NormalizationMode(enum.Enum):
    """Scope of the min-max normalization.

    DATASET: one min/max over every frame of every segment (a single affine
    map, so frame ordering across the whole dataset is preserved).
    PER_VIDEO: min/max within each segment; every non-degenerate segment
    then attains both 0 and 1, including segments with no anomaly at all.
    """

    DATASET = "dataset"
    PER_VIDEO = "video"


@dataclass(frozen=True)
class FusionWeights:
    """Non-negative weight per scored modality, by series id."""

    entries: tuple[tuple[str, float], ...]

    def __post_init__(self):
        if not self.entries:
            raise ShapeMismatch("fusion weights need at least one entry")
        for name, weight in self.entries:
            if not np.isfinite(weight) or weight < 0:
                raise ShapeMismatch(f"weight for {name!r} must be finite and >= 0, got {weight}")
        object.__setattr__(self, "entries", tuple(self.entries))

    @classmethod
    def uniform(cls, names: Sequence[str]) -> "FusionWeights":
        return cls(tuple((name, 1.0) for name in names))

    @property
    def weights(self) -> tuple[float, ...]:
        return tuple(w for _, w in self.entries)


def _affine(values: np.ndarray, lo: float, hi: float) -> np.ndarray:
    return (values - lo) / (hi - lo)


def normalize(
    series: ScoreSeries, mode: NormalizationMode
) -> tuple[ScoreSeries, tuple[str, ...]]:
    """Map GE values into [0, 1] anomaly scores.

    Returns the normalized series and the ids of any degenerate scopes
    (max == min), whose scores are set to all zeros instead of crashing.
    The scope id is "dataset" in DATASET mode, the segment id otherwise.
    Pass 1 finds the extrema; pass 2 applies the affine map.
    """
    require_nonempty(series)
    flags: list[str] = []
    if mode is NormalizationMode.DATASET:
        lo = float(series.values.min())
        hi = float(series.values.max())
        if hi == lo:
            flags.append("dataset")
            out = np.zeros(len(series))
        else:
            out = _affine(series.values, lo, hi)
        return series.with_values(out), tuple(flags)
    out = np.empty(len(series))
    for seg, vals in series.iter_segments():
        lo = float(vals.min()) if seg.length else 0.0
        hi = float(vals.max()) if seg.length else 0.0
        sl = slice(seg.start, seg.start + seg.length)
        if hi == lo:
            flags.append(seg.segment_id)
            out[sl] = 0.0
        else:
            out[sl] = _affine(vals, lo, hi)
    return series.with_values(out), tuple(flags)


def fuse(
    series_list: Sequence[ScoreSeries], weights: FusionWeights | None = None
) -> ScoreSeries:
    """Pointwise weighted sum of score series sharing one segment structure."""
    if not series_list:
        raise ShapeMismatch("fuse needs at least one series")
    first = series_list[0]
    for other in series_list[1:]:
        if not first.same_structure(other):
            raise ShapeMismatch("fused series must share segment structure")
    if weights is None:
        weights = FusionWeights.uniform([f"series{i}" for i in range(len(series_list))])
    if len(weights.entries) != len(series_list):
        raise ShapeMismatch(
            f"{len(weights.entries)} weights for {len(series_list)} series"
        )
    out = np.zeros(len(first))
    for series, weight in zip(series_list, weights.weights):
        out += weight * series.values
    return first.with_values(out)
