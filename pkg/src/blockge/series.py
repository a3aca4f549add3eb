"""Per-frame score/label series with segment structure, and temporal smoothing.

A series is one scalar (or binary label) per frame, ordered by (segment, time).
Segments are contiguous, disjoint and cover the values exactly; temporal
operations never cross a segment boundary.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .errors import EmptySeries, LabelOutOfRange, NonFiniteInput, ShapeMismatch


@dataclass(frozen=True)
class Segment:
    segment_id: str
    start: int
    length: int

    def __post_init__(self):
        if self.length < 0 or self.start < 0:
            raise ShapeMismatch(
                f"segment {self.segment_id!r}: start={self.start} length={self.length}"
            )


def _check_cover(n_values: int, segments: tuple[Segment, ...]) -> None:
    pos = 0
    for seg in segments:
        if seg.start != pos:
            raise ShapeMismatch(
                f"segment {seg.segment_id!r} starts at {seg.start}, expected {pos}"
            )
        pos += seg.length
    if pos != n_values:
        raise ShapeMismatch(f"segments cover {pos} frames, series has {n_values}")


@dataclass(frozen=True)
class ScoreSeries:
    """Ordered per-frame scalars for one or more video segments."""

    values: np.ndarray
    segments: tuple[Segment, ...]

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 1:
            raise ShapeMismatch(f"series values must be 1-D, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise NonFiniteInput("series contains NaN or infinite values")
        _check_cover(values.shape[0], self.segments)
        values = values.copy()
        values.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "segments", tuple(self.segments))

    @classmethod
    def from_segments(cls, parts: Iterable[tuple[str, np.ndarray]]) -> "ScoreSeries":
        """Build a series from (segment_id, values) pairs, in order."""
        segments = []
        chunks = []
        pos = 0
        for seg_id, vals in parts:
            vals = np.asarray(vals, dtype=np.float64)
            segments.append(Segment(seg_id, pos, vals.shape[0]))
            chunks.append(vals)
            pos += vals.shape[0]
        values = np.concatenate(chunks) if chunks else np.empty(0)
        return cls(values, tuple(segments))

    def __len__(self) -> int:
        return self.values.shape[0]

    def segment_values(self, segment: Segment) -> np.ndarray:
        return self.values[segment.start : segment.start + segment.length]

    def iter_segments(self) -> Iterator[tuple[Segment, np.ndarray]]:
        for seg in self.segments:
            yield seg, self.segment_values(seg)

    def with_values(self, values: np.ndarray) -> "ScoreSeries":
        """Same segment structure, new values."""
        return ScoreSeries(values, self.segments)

    def same_structure(self, other: "ScoreSeries | LabelSeries") -> bool:
        return self.segments == other.segments


@dataclass(frozen=True)
class LabelSeries:
    """One binary frame label (0 normal, 1 abnormal) per frame."""

    values: np.ndarray
    segments: tuple[Segment, ...]

    def __post_init__(self):
        values = np.asarray(self.values)
        if values.ndim != 1:
            raise ShapeMismatch(f"label values must be 1-D, got shape {values.shape}")
        if values.size and not np.isin(values, (0, 1)).all():
            raise LabelOutOfRange("labels must be 0 or 1")
        values = values.astype(np.int8)
        _check_cover(values.shape[0], self.segments)
        values.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "segments", tuple(self.segments))

    @classmethod
    def from_segments(cls, parts: Iterable[tuple[str, np.ndarray]]) -> "LabelSeries":
        segments = []
        chunks = []
        pos = 0
        for seg_id, vals in parts:
            vals = np.asarray(vals)
            segments.append(Segment(seg_id, pos, vals.shape[0]))
            chunks.append(vals)
            pos += vals.shape[0]
        values = np.concatenate(chunks) if chunks else np.empty(0, dtype=np.int8)
        return cls(values, tuple(segments))

    def __len__(self) -> int:
        return self.values.shape[0]

    def segment_values(self, segment: Segment) -> np.ndarray:
        return self.values[segment.start : segment.start + segment.length]

    def iter_segments(self) -> Iterator[tuple[Segment, np.ndarray]]:
        for seg in self.segments:
            yield seg, self.segment_values(seg)

    def same_structure(self, other: "ScoreSeries | LabelSeries") -> bool:
        return self.segments == other.segments


def _median_filter_1d(values: np.ndarray, radius: int) -> np.ndarray:
    """Centered median over [t-radius, t+radius]; the window shrinks at edges."""
    n = values.shape[0]
    if radius == 0 or n == 0:
        return values.copy()
    window = 2 * radius + 1
    out = np.empty(n, dtype=np.float64)
    if n >= window:
        interior = np.lib.stride_tricks.sliding_window_view(values, window)
        out[radius : n - radius] = np.median(interior, axis=1)
        edge = radius
    else:
        edge = n  # every position is an edge position
    for t in range(min(edge, n)):
        out[t] = np.median(values[max(0, t - radius) : t + radius + 1])
    for t in range(max(n - edge, min(edge, n)), n):
        out[t] = np.median(values[max(0, t - radius) : min(n, t + radius + 1)])
    return out


def median_filter(series: ScoreSeries, radius: int) -> ScoreSeries:
    """Smooth each segment along time with a shrinking-window median.

    The window never crosses a segment boundary; an even count (possible at
    shrunken edges) yields the mean of the two middle order statistics.
    """
    if radius < 0:
        raise ValueError(f"radius must be >= 0, got {radius}")
    out = np.empty(len(series), dtype=np.float64)
    for seg, vals in series.iter_segments():
        out[seg.start : seg.start + seg.length] = _median_filter_1d(vals, radius)
    return series.with_values(out)


def require_nonempty(series: ScoreSeries) -> None:
    if len(series) == 0:
        raise EmptySeries("series has no frames")
