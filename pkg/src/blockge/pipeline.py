"""End-to-end scoring and evaluation driven by dataset manifests.

The scoring pipeline is: per-frame GE map -> block-level (and optionally
frame-level) GE -> per-segment median filter -> min-max normalization ->
anomaly scores. GE maps are loaded (or computed from prediction/ground-truth
pairs) lazily per frame and are only written back to disk on request.

Frame-level stages may run in a thread pool; set the BLOCKGE_THREADS
environment variable to override the default of 1. Results are ordered, so
the thread count never changes any output.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import dataset_io
from .blocks import BlockSpec, block_level_ge, frame_level_ge
from .dataset_io import DatasetManifest, FrameEntry, ScoreFile
from .errors import BlockGEError, TooFewSegments
from .ge import GEMap, compute_ge_map
from .metrics import (
    EvalReport,
    MetricRow,
    SweepPoint,
    anomaly_saliency,
    ge_level_ratio,
    normal_ge_levels,
    pearson_correlation,
    roc_auc,
)
from .scoring import FusionWeights, NormalizationMode, fuse, normalize
from .series import LabelSeries, ScoreSeries, median_filter

THREADS_ENV = "BLOCKGE_THREADS"


def thread_count() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _map_ordered(fn: Callable, items: Sequence) -> list:
    n = thread_count()
    if n <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True)
class RunConfig:
    """Pipeline knobs; defaults follow the method's reference settings."""

    exponent: int = 2
    block: BlockSpec = BlockSpec(30, 30)
    radius: int = 15
    mode: NormalizationMode = NormalizationMode.DATASET
    weights: tuple[float, ...] | None = None
    seed: int | None = None

    def echo(self, **extra) -> dict:
        out = {
            "exponent": self.exponent,
            "block": [self.block.height, self.block.width],
            "block_anchors": "valid",
            "block_stride": 1,
            "radius": self.radius,
            "normalization": self.mode.value,
            "weights": list(self.weights) if self.weights is not None else None,
            "seed": self.seed,
        }
        out.update(extra)
        return out


def load_entry_ge(entry: FrameEntry, base_dir: Path, exponent: int) -> GEMap:
    """GE map for one manifest frame: stored map, or computed from a pair."""
    if entry.ge is not None:
        return dataset_io.read_gemap(base_dir / entry.ge)
    pred = dataset_io.read_frame(base_dir / entry.pred)
    gt = dataset_io.read_frame(base_dir / entry.gt)
    return compute_ge_map(pred, gt, exponent)


def ge_series(
    manifest: DatasetManifest,
    base_dir: str | Path,
    block: BlockSpec,
    exponent: int = 2,
    with_frame_level: bool = False,
    save_ge_dir: str | Path | None = None,
) -> tuple[ScoreSeries, ScoreSeries | None]:
    """Raw (unfiltered) block-level GE per frame, and optionally the
    frame-level mean baseline, across all manifest segments."""
    base_dir = Path(base_dir)
    save_dir = Path(save_ge_dir) if save_ge_dir is not None else None

    def one(job: tuple[str, int, FrameEntry]) -> tuple[float, float]:
        seg_id, index, entry = job
        ge_map = load_entry_ge(entry, base_dir, exponent)
        if save_dir is not None and entry.ge is None:
            target = save_dir / seg_id / f"{index:05d}.gem"
            target.parent.mkdir(parents=True, exist_ok=True)
            dataset_io.write_gemap(target, ge_map)
        block_value = block_level_ge(ge_map, block)
        frame_value = frame_level_ge(ge_map) if with_frame_level else 0.0
        return block_value, frame_value

    block_parts = []
    frame_parts = []
    for seg in manifest.segments:
        jobs = [(seg.segment_id, i, entry) for i, entry in enumerate(seg.frames)]
        results = _map_ordered(one, jobs)
        block_parts.append((seg.segment_id, np.array([r[0] for r in results])))
        frame_parts.append((seg.segment_id, np.array([r[1] for r in results])))
    block_series = ScoreSeries.from_segments(block_parts)
    frame_series = ScoreSeries.from_segments(frame_parts) if with_frame_level else None
    return block_series, frame_series


def _finish(raw: ScoreSeries, config: RunConfig, variant: str) -> ScoreFile:
    filtered = median_filter(raw, config.radius)
    scores, flags = normalize(filtered, config.mode)
    return ScoreFile(
        config=config.echo(variant=variant),
        ge=filtered,
        scores=scores,
        degenerate_scopes=flags,
    )


@dataclass(frozen=True)
class ScoreResult:
    block: ScoreFile
    frame: ScoreFile | None = None


def score_manifest(
    manifest: DatasetManifest,
    base_dir: str | Path,
    config: RunConfig,
    with_frame_level: bool = False,
    save_ge_dir: str | Path | None = None,
) -> ScoreResult:
    """Run the full scoring pipeline over one manifest."""
    raw_block, raw_frame = ge_series(
        manifest,
        base_dir,
        config.block,
        config.exponent,
        with_frame_level=with_frame_level,
        save_ge_dir=save_ge_dir,
    )
    block_file = _finish(raw_block, config, "block")
    frame_file = _finish(raw_frame, config, "frame") if raw_frame is not None else None
    return ScoreResult(block=block_file, frame=frame_file)


def fuse_score_files(
    files: Sequence[ScoreFile], config: RunConfig, weights: FusionWeights | None = None
) -> ScoreFile:
    """Weighted sum of normalized scores from several modalities.

    The fused variant only exists after normalization, so its "ge" values
    are the fused scores themselves.
    """
    if weights is None and config.weights is not None:
        weights = FusionWeights(
            tuple((f"series{i}", w) for i, w in enumerate(config.weights))
        )
    fused = fuse([f.scores for f in files], weights)
    flags = tuple(
        sorted({scope for f in files for scope in f.degenerate_scopes})
    )
    return ScoreFile(
        config=config.echo(variant="fused", fused_from=[f.config.get("variant") for f in files]),
        ge=fused,
        scores=fused,
        degenerate_scopes=flags,
    )


def evaluate_scores(score_file: ScoreFile, labels: LabelSeries) -> MetricRow:
    """AUC on normalized scores; saliency and normal levels on filtered GEs.

    Metric failures (single-class labels, zero levels, ...) are recorded in
    the row instead of aborting the remaining metrics.
    """
    name = str(score_file.config.get("variant", "scores"))
    errors: list[tuple[str, str]] = []
    auc = saliency = None
    levels: tuple[tuple[str, float], ...] = ()
    try:
        auc = roc_auc(score_file.scores, labels)
    except BlockGEError as exc:
        errors.append(("auc", type(exc).__name__))
    try:
        saliency = anomaly_saliency(score_file.ge, labels)
    except BlockGEError as exc:
        errors.append(("saliency", type(exc).__name__))
    try:
        levels = normal_ge_levels(score_file.ge, labels)
    except BlockGEError as exc:
        errors.append(("normal_levels", type(exc).__name__))
    return MetricRow(
        name=name, auc=auc, saliency=saliency, normal_levels=levels, errors=tuple(errors)
    )


def evaluate_report(
    score_files: Sequence[ScoreFile], labels: LabelSeries, config: RunConfig
) -> EvalReport:
    rows = tuple(evaluate_scores(f, labels) for f in score_files)
    flags = tuple(sorted({s for f in score_files for s in f.degenerate_scopes}))
    return EvalReport(config=config.echo(), rows=rows, degenerate_scopes=flags)


def sweep_sizes(
    manifest: DatasetManifest,
    base_dir: str | Path,
    sizes: Sequence[int],
    config: RunConfig,
) -> EvalReport:
    """AUC per square block size; sizes that do not fit are recorded, not fatal.

    The argmax entry in the report config is the smallest size attaining the
    best AUC.
    """
    if not sizes:
        raise TooFewSegments("sweep needs at least one size")
    labels = manifest.label_series()
    points: list[SweepPoint] = []
    for size in sizes:
        try:
            cfg = replace(config, block=BlockSpec(size, size))
            result = score_manifest(manifest, base_dir, cfg)
            auc = roc_auc(result.block.scores, labels)
            points.append(SweepPoint(size, size, auc=auc))
        except BlockGEError as exc:
            points.append(SweepPoint(size, size, error=type(exc).__name__))
    best = max((p.auc for p in points if p.auc is not None), default=None)
    argmax = None
    if best is not None:
        argmax = min(p.height for p in points if p.auc == best)
    echo = config.echo(sweep_sizes=list(sizes), sweep_argmax=argmax, sweep_best_auc=best)
    return EvalReport(config=echo, sweep=tuple(points))


def _pairwise_ratios(
    levels: tuple[tuple[str, float], ...]
) -> tuple[tuple[str, str, float], ...]:
    out = []
    for i in range(len(levels)):
        for j in range(i + 1, len(levels)):
            (seg_a, level_a), (seg_b, level_b) = levels[i], levels[j]
            out.append((seg_a, seg_b, ge_level_ratio(level_a, level_b)))
    return tuple(out)


def correlate_report(
    manifest: DatasetManifest, base_dir: str | Path, config: RunConfig
) -> EvalReport:
    """Foreground-count correlation and level ratios, frame vs block variant.

    Normal-GE-levels are taken from the median-filtered GE series, matching
    what the score files carry.
    """
    counts = manifest.target_counts()
    if len(counts) < 2:
        raise TooFewSegments(
            f"correlation needs >= 2 segments with target counts, got {len(counts)}"
        )
    counted = {seg_id for seg_id, _ in counts}
    labels = manifest.label_series()
    raw_block, raw_frame = ge_series(
        manifest, base_dir, config.block, config.exponent, with_frame_level=True
    )
    rows = []
    for name, raw in (("frame", raw_frame), ("block", raw_block)):
        filtered = median_filter(raw, config.radius)
        errors: list[tuple[str, str]] = []
        correlation = None
        levels: tuple[tuple[str, float], ...] = ()
        ratios: tuple[tuple[str, str, float], ...] = ()
        try:
            levels = tuple(
                (seg_id, level)
                for seg_id, level in normal_ge_levels(filtered, labels)
                if seg_id in counted
            )
            level_by_id = dict(levels)
            xs = [count for _, count in counts]
            ys = [level_by_id[seg_id] for seg_id, _ in counts]
            correlation = pearson_correlation(xs, ys)
        except BlockGEError as exc:
            errors.append(("correlation", type(exc).__name__))
        try:
            ratios = _pairwise_ratios(levels)
        except BlockGEError as exc:
            errors.append(("ratios", type(exc).__name__))
        rows.append(
            MetricRow(
                name=name,
                correlation=correlation,
                normal_levels=levels,
                ratios=ratios,
                errors=tuple(errors),
            )
        )
    return EvalReport(config=config.echo(), rows=tuple(rows))


def _subset_series(series: ScoreSeries, segment_ids: set[str]) -> ScoreSeries:
    return ScoreSeries.from_segments(
        (seg.segment_id, vals)
        for seg, vals in series.iter_segments()
        if seg.segment_id in segment_ids
    )


def _subset_labels(labels: LabelSeries, segment_ids: set[str]) -> LabelSeries:
    return LabelSeries.from_segments(
        (seg.segment_id, vals)
        for seg, vals in labels.iter_segments()
        if seg.segment_id in segment_ids
    )


def norm_compare_report(
    manifest: DatasetManifest, base_dir: str | Path, config: RunConfig
) -> EvalReport:
    """AUC under dataset-wide vs per-video normalization, on two populations:
    the segments that contain anomalies, and every segment."""
    labels = manifest.label_series()
    anomalous = {
        seg.segment_id
        for seg, vals in labels.iter_segments()
        if bool(np.any(vals == 1))
    }
    all_ids = {seg.segment_id for seg in labels.segments}
    raw_block, _ = ge_series(manifest, base_dir, config.block, config.exponent)
    filtered = median_filter(raw_block, config.radius)

    rows = []
    raw_auc_all = None
    norm_auc = {}
    flags: set[str] = set()
    for pop_name, ids in (("anomalous", anomalous), ("all", all_ids)):
        pop_series = _subset_series(filtered, ids) if ids else None
        pop_labels = _subset_labels(labels, ids) if ids else None
        for mode in (NormalizationMode.DATASET, NormalizationMode.PER_VIDEO):
            mode_name = "norm0" if mode is NormalizationMode.DATASET else "norm1"
            row_name = f"{mode_name}-{pop_name}"
            errors: list[tuple[str, str]] = []
            auc = None
            if pop_series is None or len(pop_series) == 0:
                errors.append(("auc", "EmptySeries"))
            else:
                try:
                    scores, mode_flags = normalize(pop_series, mode)
                    flags.update(f"{pop_name}:{s}" for s in mode_flags)
                    auc = roc_auc(scores, pop_labels)
                    if pop_name == "all" and mode is NormalizationMode.DATASET:
                        raw_auc_all = roc_auc(pop_series, pop_labels)
                except BlockGEError as exc:
                    errors.append(("auc", type(exc).__name__))
            norm_auc[row_name] = auc
            rows.append(MetricRow(name=row_name, auc=auc, errors=tuple(errors)))
    delta = None
    if norm_auc.get("norm0-all") is not None and norm_auc.get("norm1-all") is not None:
        delta = norm_auc["norm0-all"] - norm_auc["norm1-all"]
    echo = config.echo(
        populations={"anomalous": sorted(anomalous), "all": sorted(all_ids)},
        raw_auc_mixed=raw_auc_all,
        norm1_mixed_degradation=delta,
    )
    return EvalReport(config=echo, rows=tuple(rows), degenerate_scopes=tuple(sorted(flags)))
