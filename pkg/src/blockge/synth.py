"""Deterministic synthetic GE-map datasets with planted anomalies.

Frames are built from axis-aligned constant-intensity squares so the key
statistics are analytically predictable: with zero noise, the frame-level GE
of a normal frame is exactly count * intensity * blob_area / (H * W), and a
block at least as large as the blob that can only see one blob at a time
yields a block-level GE that does not depend on the target count at all.

Noise model, per frame:
  * a uniform per-pixel floor in [0, noise_amplitude], and
  * optional square "speckles" - short-lived high-GE outliers (the analogue
    of motion-edge spikes in real GE maps) stamped at a random intensity.
Both default off. Blobs and speckles are stamped with max(), then the floor
is added, so overlaps never stack intensities.

All randomness comes from one seeded PCG64 stream per segment (spawn key =
segment index), which makes datasets byte-identical for identical configs
and lets segments generate independently.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParseError, PlacementFailure
from .ge import GEMap
from .series import LabelSeries

PLACEMENT_RETRIES = 1000
RNG_ALGORITHM = "numpy-pcg64"


@dataclass(frozen=True)
class AnomalyWindow:
    """Frames [start, end) of a segment carry one size x size blob at
    the given intensity, at a position fixed for the whole window."""

    start: int
    end: int
    size: int
    intensity: float


@dataclass(frozen=True)
class SegmentSpec:
    length: int
    target_count: int
    anomalies: tuple[AnomalyWindow, ...] = ()
    segment_id: str | None = None


@dataclass(frozen=True)
class SynthConfig:
    height: int
    width: int
    segments: tuple[SegmentSpec, ...]
    blob_size: int
    blob_intensity: float
    noise_amplitude: float = 0.0
    speckle_rate: float = 0.0
    speckle_size: int = 4
    speckle_intensity: tuple[float, float] = (0.5, 1.25)
    min_gap: int = 0
    intensity_flicker: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.height < 1 or self.width < 1:
            raise ParseError(f"frame size must be positive, got {self.height} x {self.width}")
        if not 1 <= self.blob_size <= min(self.height, self.width):
            raise ParseError(f"blob size {self.blob_size} does not fit the frame")
        if self.blob_intensity < 0:
            raise ParseError("blob intensity must be >= 0")
        if self.noise_amplitude < 0:
            raise ParseError("noise amplitude must be >= 0")
        if self.speckle_rate < 0:
            raise ParseError("speckle rate must be >= 0")
        if self.speckle_rate > 0 and not 1 <= self.speckle_size <= min(self.height, self.width):
            raise ParseError(f"speckle size {self.speckle_size} does not fit the frame")
        lo, hi = self.speckle_intensity
        if lo < 0 or hi < lo:
            raise ParseError(f"speckle intensity range invalid: ({lo}, {hi})")
        if self.min_gap < 0:
            raise ParseError("min gap must be >= 0")
        if not 0 <= self.intensity_flicker < 1:
            raise ParseError("intensity flicker must be in [0, 1)")
        if not self.segments:
            raise ParseError("config needs at least one segment")
        for i, seg in enumerate(self.segments):
            if seg.length < 1:
                raise ParseError(f"segment {i}: length must be >= 1")
            if seg.target_count < 0:
                raise ParseError(f"segment {i}: target count must be >= 0")
            for win in seg.anomalies:
                if not 0 <= win.start < win.end <= seg.length:
                    raise ParseError(
                        f"segment {i}: window [{win.start}, {win.end}) outside [0, {seg.length})"
                    )
                if not 1 <= win.size <= min(self.height, self.width):
                    raise ParseError(f"segment {i}: anomaly size {win.size} does not fit")
                if win.intensity <= self.blob_intensity:
                    raise ParseError(
                        f"segment {i}: anomaly intensity {win.intensity} must exceed "
                        f"normal intensity {self.blob_intensity}"
                    )
        object.__setattr__(self, "segments", tuple(self.segments))
        object.__setattr__(self, "speckle_intensity", (float(lo), float(hi)))

    def segment_ids(self) -> tuple[str, ...]:
        return tuple(
            seg.segment_id if seg.segment_id is not None else f"seg{i:03d}"
            for i, seg in enumerate(self.segments)
        )

    def to_dict(self) -> dict:
        return {
            "height": self.height,
            "width": self.width,
            "blob_size": self.blob_size,
            "blob_intensity": self.blob_intensity,
            "noise_amplitude": self.noise_amplitude,
            "speckle_rate": self.speckle_rate,
            "speckle_size": self.speckle_size,
            "speckle_intensity": list(self.speckle_intensity),
            "min_gap": self.min_gap,
            "intensity_flicker": self.intensity_flicker,
            "seed": self.seed,
            "segments": [
                {
                    "id": seg_id,
                    "length": seg.length,
                    "target_count": seg.target_count,
                    "anomalies": [
                        {
                            "start": w.start,
                            "end": w.end,
                            "size": w.size,
                            "intensity": w.intensity,
                        }
                        for w in seg.anomalies
                    ],
                }
                for seg, seg_id in zip(self.segments, self.segment_ids())
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SynthConfig":
        try:
            segments = tuple(
                SegmentSpec(
                    length=int(seg["length"]),
                    target_count=int(seg["target_count"]),
                    anomalies=tuple(
                        AnomalyWindow(
                            start=int(w["start"]),
                            end=int(w["end"]),
                            size=int(w["size"]),
                            intensity=float(w["intensity"]),
                        )
                        for w in seg.get("anomalies", [])
                    ),
                    segment_id=seg.get("id"),
                )
                for seg in data["segments"]
            )
            return cls(
                height=int(data["height"]),
                width=int(data["width"]),
                segments=segments,
                blob_size=int(data["blob_size"]),
                blob_intensity=float(data["blob_intensity"]),
                noise_amplitude=float(data.get("noise_amplitude", 0.0)),
                speckle_rate=float(data.get("speckle_rate", 0.0)),
                speckle_size=int(data.get("speckle_size", 4)),
                speckle_intensity=tuple(data.get("speckle_intensity", (0.5, 1.25))),
                min_gap=int(data.get("min_gap", 0)),
                intensity_flicker=float(data.get("intensity_flicker", 0.0)),
                seed=int(data.get("seed", 0)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad synth config: {exc}") from exc


@dataclass(frozen=True)
class SynthDataset:
    """In-memory result of generate(): maps aligned with the manifest order."""

    config: SynthConfig
    maps: tuple[GEMap, ...]
    labels: LabelSeries
    target_counts: tuple[tuple[str, int], ...]

    def map_path(self, segment_id: str, frame_index: int) -> str:
        """Canonical relative path used when the dataset is saved."""
        return f"maps/{segment_id}/{frame_index:05d}.gem"


def _segment_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(
        np.random.PCG64(np.random.SeedSequence(entropy=seed, spawn_key=(index,)))
    )


def _place(
    rng: np.random.Generator, cfg: SynthConfig, count: int, context: str
) -> list[tuple[int, int]]:
    """Rejection-sample non-overlapping blob anchors.

    Two blobs collide when their boxes are closer than min_gap (Chebyshev);
    after PLACEMENT_RETRIES failed draws for one blob, give up hard.
    """
    b = cfg.blob_size
    reach = b + cfg.min_gap
    anchors: list[tuple[int, int]] = []
    for blob_index in range(count):
        for _ in range(PLACEMENT_RETRIES):
            r = int(rng.integers(0, cfg.height - b + 1))
            c = int(rng.integers(0, cfg.width - b + 1))
            if all(abs(r - pr) >= reach or abs(c - pc) >= reach for pr, pc in anchors):
                anchors.append((r, c))
                break
        else:
            raise PlacementFailure(
                f"{context}: no room for blob {blob_index + 1} of {count} "
                f"after {PLACEMENT_RETRIES} retries"
            )
    return anchors


def _stamp(canvas: np.ndarray, r: int, c: int, size: int, value: float) -> None:
    region = canvas[r : r + size, c : c + size]
    np.maximum(region, value, out=region)


def generate(config: SynthConfig) -> SynthDataset:
    """Generate every frame, label and target count for the config.

    Per segment, the random stream is consumed in a fixed documented order:
    one anchor per anomaly window, then per frame: blob placement, flicker
    multiplier (if configured), speckles (count, then position + intensity
    each), and finally the uniform noise field.
    """
    maps: list[GEMap] = []
    label_parts: list[tuple[str, np.ndarray]] = []
    counts: list[tuple[str, int]] = []
    seg_ids = config.segment_ids()
    for index, (seg, seg_id) in enumerate(zip(config.segments, seg_ids)):
        rng = _segment_rng(config.seed, index)
        window_anchors = [
            (
                int(rng.integers(0, config.height - w.size + 1)),
                int(rng.integers(0, config.width - w.size + 1)),
            )
            for w in seg.anomalies
        ]
        labels = np.zeros(seg.length, dtype=np.int8)
        for t in range(seg.length):
            canvas = np.zeros((config.height, config.width), dtype=np.float64)
            anchors = _place(rng, config, seg.target_count, f"segment {seg_id!r} frame {t}")
            flicker = 1.0
            if config.intensity_flicker > 0:
                flicker = 1.0 + float(
                    rng.uniform(-config.intensity_flicker, config.intensity_flicker)
                )
            for r, c in anchors:
                _stamp(canvas, r, c, config.blob_size, config.blob_intensity * flicker)
            for w, (ar, ac) in zip(seg.anomalies, window_anchors):
                if w.start <= t < w.end:
                    labels[t] = 1
                    _stamp(canvas, ar, ac, w.size, w.intensity * flicker)
            if config.speckle_rate > 0:
                lo, hi = config.speckle_intensity
                for _ in range(int(rng.poisson(config.speckle_rate))):
                    sr = int(rng.integers(0, config.height - config.speckle_size + 1))
                    sc = int(rng.integers(0, config.width - config.speckle_size + 1))
                    _stamp(canvas, sr, sc, config.speckle_size, float(rng.uniform(lo, hi)))
            if config.noise_amplitude > 0:
                canvas += rng.random((config.height, config.width)) * config.noise_amplitude
            maps.append(GEMap(canvas))
        label_parts.append((seg_id, labels))
        counts.append((seg_id, seg.target_count))
    return SynthDataset(
        config=config,
        maps=tuple(maps),
        labels=LabelSeries.from_segments(label_parts),
        target_counts=tuple(counts),
    )
