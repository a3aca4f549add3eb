"""Evaluation statistics: frame-level ROC AUC, anomaly saliency,
normal-GE-levels, level ratios and foreground-count correlation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    NonPositiveLevel,
    NoNormalFrames,
    ShapeMismatch,
    SingleClass,
    TooFewSegments,
    ZeroNormalLevel,
    ZeroVariance,
)
from .series import LabelSeries, ScoreSeries


def _paired(scores: ScoreSeries, labels: LabelSeries) -> tuple[np.ndarray, np.ndarray]:
    if not scores.same_structure(labels):
        raise ShapeMismatch("scores and labels must share segment structure")
    return scores.values, labels.values


def _average_ranks(values: np.ndarray) -> np.ndarray:
    """1-based ranks, ties sharing the average of their rank range."""
    n = values.shape[0]
    order = np.argsort(values, kind="stable")
    ordered = values[order]
    change = np.flatnonzero(ordered[1:] != ordered[:-1]) + 1
    starts = np.concatenate(([0], change))
    ends = np.concatenate((change, [n]))
    group_rank = (starts + ends - 1) / 2.0 + 1.0
    ranks = np.empty(n, dtype=np.float64)
    ranks[order] = np.repeat(group_rank, ends - starts)
    return ranks


def roc_auc(scores: ScoreSeries, labels: LabelSeries) -> float:
    """Frame-level area under the ROC curve.

    Computed as the rank statistic P(score_pos > score_neg) + 0.5 * P(equal),
    which is deterministic under ties and equals the area traced by sweeping
    all thresholds.
    """
    values, y = _paired(scores, labels)
    n_pos = int(y.sum())
    n_neg = y.shape[0] - n_pos
    if n_pos == 0 or n_neg == 0:
        raise SingleClass("AUC needs at least one normal and one abnormal frame")
    ranks = _average_ranks(values)
    pos_rank_sum = float(ranks[y == 1].sum())
    return (pos_rank_sum - n_pos * (n_pos + 1) / 2.0) / (float(n_pos) * float(n_neg))


def anomaly_saliency(scores: ScoreSeries, labels: LabelSeries) -> float:
    """Relative elevation of abnormal-frame GE over normal-frame GE.

    Uses dataset-global class means: (mean_abnormal - mean_normal) / mean_normal.
    Scale-invariant, so it reads the same on raw or uniformly rescaled GEs.
    """
    values, y = _paired(scores, labels)
    n_pos = int(y.sum())
    if n_pos == 0 or n_pos == y.shape[0]:
        raise SingleClass("saliency needs both classes present")
    normal_mean = float(values[y == 0].mean())
    abnormal_mean = float(values[y == 1].mean())
    if normal_mean == 0.0:
        raise ZeroNormalLevel("mean GE of normal frames is zero")
    return (abnormal_mean - normal_mean) / normal_mean


def normal_ge_level(segment_scores: np.ndarray, segment_labels: np.ndarray) -> float:
    """Mean GE over the normal frames of one segment."""
    segment_scores = np.asarray(segment_scores, dtype=np.float64)
    segment_labels = np.asarray(segment_labels)
    if segment_scores.shape != segment_labels.shape:
        raise ShapeMismatch("segment scores and labels differ in length")
    mask = segment_labels == 0
    if not mask.any():
        raise NoNormalFrames("segment has no normal frames")
    return float(segment_scores[mask].mean())


def normal_ge_levels(
    scores: ScoreSeries, labels: LabelSeries
) -> tuple[tuple[str, float], ...]:
    """Normal-GE-level of every segment, in manifest order."""
    _paired(scores, labels)
    out = []
    for seg, vals in scores.iter_segments():
        out.append((seg.segment_id, normal_ge_level(vals, labels.segment_values(seg))))
    return tuple(out)


def ge_level_ratio(level_a: float, level_b: float) -> float:
    """Higher normal-GE-level divided by the lower; always >= 1."""
    if level_a <= 0 or level_b <= 0:
        raise NonPositiveLevel(f"levels must be positive, got {level_a} and {level_b}")
    return max(level_a, level_b) / min(level_a, level_b)


def pearson_correlation(xs, ys) -> float:
    """Standard Pearson r between per-segment values."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if xs.shape != ys.shape:
        raise ShapeMismatch("correlation inputs differ in length")
    if xs.shape[0] < 2:
        raise TooFewSegments("correlation needs at least two segments")
    xd = xs - xs.mean()
    yd = ys - ys.mean()
    denom = float(np.sqrt((xd * xd).sum() * (yd * yd).sum()))
    if denom == 0.0:
        raise ZeroVariance("correlation inputs must have nonzero variance")
    return float(np.clip((xd * yd).sum() / denom, -1.0, 1.0))


@dataclass(frozen=True)
class SweepPoint:
    """One block size of an AUC sweep; failed sizes carry an error name."""

    height: int
    width: int
    auc: float | None = None
    error: str | None = None


@dataclass(frozen=True)
class MetricRow:
    """Metrics of one scored variant (e.g. "block", "frame", "fused").

    Metrics that could not be computed are absent (None) and the reason is
    recorded under ``errors`` as (metric name, error name) pairs.
    """

    name: str
    auc: float | None = None
    saliency: float | None = None
    correlation: float | None = None
    normal_levels: tuple[tuple[str, float], ...] = ()
    ratios: tuple[tuple[str, str, float], ...] = ()
    errors: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        if self.auc is not None and not 0.0 <= self.auc <= 1.0:
            raise ValueError(f"auc out of range: {self.auc}")
        if self.correlation is not None and not -1.0 <= self.correlation <= 1.0:
            raise ValueError(f"correlation out of range: {self.correlation}")
        for seg_a, seg_b, ratio in self.ratios:
            if ratio < 1.0:
                raise ValueError(f"ratio for ({seg_a}, {seg_b}) below 1: {ratio}")


@dataclass(frozen=True)
class EvalReport:
    """Serializable bundle of every statistic produced by one evaluation run.

    ``config`` echoes the full run configuration (exponent, block, radius,
    normalization mode, weights, seed) so results are reproducible from the
    report alone.
    """

    config: dict
    rows: tuple[MetricRow, ...] = ()
    sweep: tuple[SweepPoint, ...] = ()
    degenerate_scopes: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "config": self.config,
            "rows": [
                {
                    "name": r.name,
                    "auc": r.auc,
                    "saliency": r.saliency,
                    "correlation": r.correlation,
                    "normal_levels": [[s, v] for s, v in r.normal_levels],
                    "ratios": [[a, b, v] for a, b, v in r.ratios],
                    "errors": [[m, e] for m, e in r.errors],
                }
                for r in self.rows
            ],
            "sweep": [
                {"height": p.height, "width": p.width, "auc": p.auc, "error": p.error}
                for p in self.sweep
            ],
            "degenerate_scopes": list(self.degenerate_scopes),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "EvalReport":
        rows = tuple(
            MetricRow(
                name=r["name"],
                auc=r["auc"],
                saliency=r["saliency"],
                correlation=r["correlation"],
                normal_levels=tuple((s, v) for s, v in r["normal_levels"]),
                ratios=tuple((a, b, v) for a, b, v in r["ratios"]),
                errors=tuple((m, e) for m, e in r["errors"]),
            )
            for r in data["rows"]
        )
        sweep = tuple(
            SweepPoint(p["height"], p["width"], p["auc"], p["error"])
            for p in data["sweep"]
        )
        return cls(
            config=data["config"],
            rows=rows,
            sweep=sweep,
            degenerate_scopes=tuple(data["degenerate_scopes"]),
        )
