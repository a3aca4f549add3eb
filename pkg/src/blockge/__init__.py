"""Block-level generation-error scoring for video anomaly detection.

Turns per-frame generation-error maps (from any generative video model)
into frame-level anomaly scores: sliding-window block means via an integral
image, max over the frame, temporal median filtering, min-max normalization
and weighted fusion — plus the evaluation stack (ROC AUC, anomaly saliency,
foreground-count correlation, normal-GE-level ratios, block-size sweeps),
a seeded synthetic dataset generator and deterministic SVG reports.
"""

from .blocks import (
    BlockMeanGrid,
    BlockSpec,
    IntegralTable,
    block_level_ge,
    block_means,
    frame_level_ge,
    integral_image,
)
from .ge import FrameImage, GEMap, compute_ge_map
from .metrics import (
    EvalReport,
    MetricRow,
    SweepPoint,
    anomaly_saliency,
    ge_level_ratio,
    normal_ge_level,
    normal_ge_levels,
    pearson_correlation,
    roc_auc,
)
from .scoring import FusionWeights, NormalizationMode, fuse, normalize
from .series import LabelSeries, ScoreSeries, Segment, median_filter
from .synth import AnomalyWindow, SegmentSpec, SynthConfig, SynthDataset, generate

__version__ = "0.1.0"

__all__ = [
    "AnomalyWindow",
    "BlockMeanGrid",
    "BlockSpec",
    "EvalReport",
    "FrameImage",
    "FusionWeights",
    "GEMap",
    "IntegralTable",
    "LabelSeries",
    "MetricRow",
    "NormalizationMode",
    "ScoreSeries",
    "Segment",
    "SegmentSpec",
    "SweepPoint",
    "SynthConfig",
    "SynthDataset",
    "anomaly_saliency",
    "block_level_ge",
    "block_means",
    "compute_ge_map",
    "frame_level_ge",
    "fuse",
    "ge_level_ratio",
    "generate",
    "integral_image",
    "median_filter",
    "normal_ge_level",
    "normal_ge_levels",
    "normalize",
    "pearson_correlation",
    "roc_auc",
]
