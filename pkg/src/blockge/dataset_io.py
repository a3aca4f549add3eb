"""File formats: GEM1 rasters, portable graymaps/pixmaps, manifests, scores.

GEM1 is this project's bit-exact raw-float raster format for GE maps:

    bytes  0..3   magic "GEM1"
    bytes  4..7   height, unsigned 32-bit little-endian
    bytes  8..11  width, unsigned 32-bit little-endian
    then          height * width IEEE-754 binary32 little-endian values,
                  row-major

A dataset manifest is a single JSON document (schema below) listing video
segments, their frame sources and frame labels. Frame order within a segment
is exactly manifest order. Paths are resolved relative to the manifest file.

    {
      "schema_version": 1,
      "name": "...",
      "defaults": {"exponent": 2, "block": [30, 30]},    # optional echo
      "generator": {...},                                 # optional echo
      "segments": [
        {"id": "seg000",
         "target_count": 12,                              # optional
         "frames": [
           {"ge": "maps/seg000/00000.gem", "label": 0},
           {"pred": "p.pgm", "gt": "g.pgm", "label": 1}
         ]}
      ]
    }

Score files are JSON too: the filtered GE series, the normalized scores,
the segment structure and the full configuration echo.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    BadMagic,
    DuplicateSegmentId,
    LabelOutOfRange,
    MissingFile,
    NonFiniteValue,
    ParseError,
    TruncatedFile,
)
from .ge import FrameImage, GEMap
from .series import LabelSeries, ScoreSeries, Segment
from .synth import SynthDataset

GEM1_MAGIC = b"GEM1"


# ---------------------------------------------------------------------------
# GEM1


def write_gemap(path: str | Path, ge_map: GEMap) -> None:
    """Write a GE map losslessly in the GEM1 format."""
    payload = ge_map.values.astype("<f4").tobytes(order="C")
    header = GEM1_MAGIC + struct.pack("<II", ge_map.height, ge_map.width)
    Path(path).write_bytes(header + payload)


def _read_gem1(path: Path, data: bytes) -> GEMap:
    if len(data) < 12:
        raise TruncatedFile(f"{path}: GEM1 header needs 12 bytes, file has {len(data)}")
    height, width = struct.unpack("<II", data[4:12])
    expected = 12 + 4 * height * width
    if len(data) < expected:
        raise TruncatedFile(f"{path}: expected {expected} bytes, file has {len(data)}")
    values = np.frombuffer(data[12:expected], dtype="<f4").reshape(height, width)
    if not np.all(np.isfinite(values)):
        raise NonFiniteValue(f"{path}: GE map contains NaN or infinite samples")
    return GEMap(values)


def read_gemap(path: str | Path) -> GEMap:
    """Read a GE map from a GEM1 file or an 8/16-bit binary graymap.

    Graymap samples scale to [0, 1] by the file's max sample value.
    """
    path = Path(path)
    if not path.is_file():
        raise MissingFile(str(path))
    data = path.read_bytes()
    if data[:4] == GEM1_MAGIC:
        return _read_gem1(path, data)
    if data[:2] == b"P5":
        samples, _ = _read_pnm(path, data)
        return GEMap(samples[:, :, 0])
    raise BadMagic(f"{path}: not a GEM1 or binary graymap file")


# ---------------------------------------------------------------------------
# Portable graymap / pixmap (binary P5 / P6)


def _read_pnm(path: Path, data: bytes) -> tuple[np.ndarray, int]:
    """Parse binary P5/P6; returns float32 samples in [0, 1], (H, W, C)."""
    magic = data[:2]
    if magic not in (b"P5", b"P6"):
        raise BadMagic(f"{path}: expected P5 or P6, got {magic!r}")
    channels = 1 if magic == b"P5" else 3

    pos = 2
    fields: list[int] = []
    while len(fields) < 3:
        if pos >= len(data):
            raise TruncatedFile(f"{path}: header ended early")
        ch = data[pos : pos + 1]
        if ch == b"#":
            eol = data.find(b"\n", pos)
            if eol == -1:
                raise TruncatedFile(f"{path}: unterminated comment")
            pos = eol + 1
        elif ch.isspace():
            pos += 1
        else:
            end = pos
            while end < len(data) and not data[end : end + 1].isspace():
                end += 1
            token = data[pos:end]
            if not token.isdigit():
                raise ParseError(f"{path}: bad header token {token!r}")
            fields.append(int(token))
            pos = end
    pos += 1  # single whitespace byte after maxval
    width, height, maxval = fields
    if not 0 < maxval < 65536:
        raise ParseError(f"{path}: max sample value {maxval} out of range")
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    count = height * width * channels
    expected = pos + count * dtype.itemsize
    if len(data) < expected:
        raise TruncatedFile(f"{path}: expected {expected} bytes, file has {len(data)}")
    raw = np.frombuffer(data[pos:expected], dtype=dtype).reshape(height, width, channels)
    return (raw.astype(np.float32) / np.float32(maxval)), maxval


def read_frame(path: str | Path) -> FrameImage:
    """Read a binary graymap (1 channel) or pixmap (3 channels) frame."""
    path = Path(path)
    if not path.is_file():
        raise MissingFile(str(path))
    samples, _ = _read_pnm(path, path.read_bytes())
    return FrameImage(samples)


def write_frame(path: str | Path, frame: FrameImage, maxval: int = 255) -> None:
    """Quantize [0, 1] intensities to a binary graymap or pixmap."""
    if not 0 < maxval < 65536:
        raise ParseError(f"max sample value {maxval} out of range")
    if frame.channels not in (1, 3):
        raise ParseError(f"portable maps hold 1 or 3 channels, frame has {frame.channels}")
    magic = b"P5" if frame.channels == 1 else b"P6"
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    quantized = np.clip(np.rint(frame.values * float(maxval)), 0, maxval).astype(dtype)
    header = b"%s\n%d %d\n%d\n" % (magic, frame.width, frame.height, maxval)
    Path(path).write_bytes(header + quantized.tobytes(order="C"))


def export_gemap_pgm(path: str | Path, ge_map: GEMap, maxval: int = 255) -> None:
    """Grayscale graymap export of a GE map, scaled by its max value."""
    peak = float(ge_map.values.max())
    scaled = ge_map.values / peak if peak > 0 else ge_map.values
    write_frame(path, FrameImage(scaled[:, :, np.newaxis]), maxval)


# ---------------------------------------------------------------------------
# Manifests


@dataclass(frozen=True)
class FrameEntry:
    """One frame: either a GE map file, or a prediction + ground-truth pair."""

    label: int
    ge: str | None = None
    pred: str | None = None
    gt: str | None = None


@dataclass(frozen=True)
class ManifestSegment:
    segment_id: str
    frames: tuple[FrameEntry, ...]
    target_count: int | None = None


@dataclass(frozen=True)
class DatasetManifest:
    name: str
    segments: tuple[ManifestSegment, ...]
    defaults: dict = field(default_factory=dict)
    generator: dict | None = None

    def label_series(self) -> LabelSeries:
        return LabelSeries.from_segments(
            (seg.segment_id, np.array([f.label for f in seg.frames], dtype=np.int8))
            for seg in self.segments
        )

    def segment_structure(self) -> tuple[Segment, ...]:
        out = []
        pos = 0
        for seg in self.segments:
            out.append(Segment(seg.segment_id, pos, len(seg.frames)))
            pos += len(seg.frames)
        return tuple(out)

    def target_counts(self) -> tuple[tuple[str, int], ...]:
        return tuple(
            (seg.segment_id, seg.target_count)
            for seg in self.segments
            if seg.target_count is not None
        )

    def to_dict(self) -> dict:
        segments = []
        for seg in self.segments:
            frames = []
            for f in seg.frames:
                entry: dict = {}
                if f.ge is not None:
                    entry["ge"] = f.ge
                if f.pred is not None:
                    entry["pred"] = f.pred
                if f.gt is not None:
                    entry["gt"] = f.gt
                entry["label"] = f.label
                frames.append(entry)
            item: dict = {"id": seg.segment_id, "frames": frames}
            if seg.target_count is not None:
                item["target_count"] = seg.target_count
            segments.append(item)
        out: dict = {"schema_version": 1, "name": self.name, "segments": segments}
        if self.defaults:
            out["defaults"] = self.defaults
        if self.generator is not None:
            out["generator"] = self.generator
        return out


def _manifest_from_dict(data: dict, where: str) -> DatasetManifest:
    if not isinstance(data, dict):
        raise ParseError(f"{where}: manifest must be a JSON object")
    if data.get("schema_version") != 1:
        raise ParseError(f"{where}: schema_version must be 1")
    if not isinstance(data.get("name"), str):
        raise ParseError(f"{where}: 'name' must be a string")
    raw_segments = data.get("segments")
    if not isinstance(raw_segments, list) or not raw_segments:
        raise ParseError(f"{where}: 'segments' must be a non-empty array")
    seen: set[str] = set()
    segments = []
    for i, seg in enumerate(raw_segments):
        ctx = f"{where}: segments[{i}]"
        if not isinstance(seg, dict) or not isinstance(seg.get("id"), str):
            raise ParseError(f"{ctx}: needs a string 'id'")
        seg_id = seg["id"]
        if seg_id in seen:
            raise DuplicateSegmentId(f"{ctx}: duplicate segment id {seg_id!r}")
        seen.add(seg_id)
        count = seg.get("target_count")
        if count is not None and (not isinstance(count, int) or count < 0):
            raise ParseError(f"{ctx}: target_count must be a non-negative integer")
        raw_frames = seg.get("frames")
        if not isinstance(raw_frames, list) or not raw_frames:
            raise ParseError(f"{ctx}: 'frames' must be a non-empty array")
        frames = []
        for j, f in enumerate(raw_frames):
            fctx = f"{ctx}.frames[{j}]"
            if not isinstance(f, dict):
                raise ParseError(f"{fctx}: must be an object")
            label = f.get("label")
            if label not in (0, 1):
                raise LabelOutOfRange(f"{fctx}: label must be 0 or 1, got {label!r}")
            ge = f.get("ge")
            pred = f.get("pred")
            gt = f.get("gt")
            if ge is not None:
                if not isinstance(ge, str):
                    raise ParseError(f"{fctx}: 'ge' must be a path string")
            elif pred is not None or gt is not None:
                if not (isinstance(pred, str) and isinstance(gt, str)):
                    raise ParseError(f"{fctx}: needs both 'pred' and 'gt' paths")
            else:
                raise ParseError(f"{fctx}: needs 'ge' or a 'pred'/'gt' pair")
            frames.append(FrameEntry(label=label, ge=ge, pred=pred, gt=gt))
        segments.append(
            ManifestSegment(segment_id=seg_id, frames=tuple(frames), target_count=count)
        )
    defaults = data.get("defaults", {})
    if not isinstance(defaults, dict):
        raise ParseError(f"{where}: 'defaults' must be an object")
    generator = data.get("generator")
    if generator is not None and not isinstance(generator, dict):
        raise ParseError(f"{where}: 'generator' must be an object")
    return DatasetManifest(
        name=data["name"], segments=tuple(segments), defaults=defaults, generator=generator
    )


def load_manifest(path: str | Path) -> DatasetManifest:
    """Load and fully validate a manifest; checks every referenced file."""
    path = Path(path)
    if not path.is_file():
        raise MissingFile(str(path))
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    manifest = _manifest_from_dict(data, str(path))
    base = path.parent
    for seg in manifest.segments:
        for j, f in enumerate(seg.frames):
            for p in (f.ge, f.pred, f.gt):
                if p is not None and not (base / p).is_file():
                    raise MissingFile(
                        f"{path}: segments[{seg.segment_id!r}].frames[{j}]: {base / p}"
                    )
    return manifest


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n")


def save_manifest(manifest: DatasetManifest, path: str | Path) -> None:
    _write_json(Path(path), manifest.to_dict())


def save_dataset(dataset: SynthDataset, out_dir: str | Path) -> Path:
    """Write a generated dataset (GEM1 maps + manifest.json); returns the
    manifest path."""
    out_dir = Path(out_dir)
    seg_ids = dataset.config.segment_ids()
    segments = []
    index = 0
    for seg, seg_id in zip(dataset.config.segments, seg_ids):
        frames = []
        for t in range(seg.length):
            rel = dataset.map_path(seg_id, t)
            target = out_dir / rel
            target.parent.mkdir(parents=True, exist_ok=True)
            write_gemap(target, dataset.maps[index])
            frames.append(
                FrameEntry(label=int(dataset.labels.values[index]), ge=rel)
            )
            index += 1
        segments.append(
            ManifestSegment(
                segment_id=seg_id, frames=tuple(frames), target_count=seg.target_count
            )
        )
    manifest = DatasetManifest(
        name="synthetic",
        segments=tuple(segments),
        generator={"algorithm": "numpy-pcg64", "config": dataset.config.to_dict()},
    )
    manifest_path = out_dir / "manifest.json"
    save_manifest(manifest, manifest_path)
    return manifest_path


# ---------------------------------------------------------------------------
# Score files


@dataclass(frozen=True)
class ScoreFile:
    """Filtered GE values plus normalized anomaly scores for one variant."""

    config: dict
    ge: ScoreSeries
    scores: ScoreSeries
    degenerate_scopes: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "config": self.config,
            "segments": [
                {"id": s.segment_id, "length": s.length} for s in self.ge.segments
            ],
            "ge": [float(v) for v in self.ge.values],
            "scores": [float(v) for v in self.scores.values],
            "degenerate_scopes": list(self.degenerate_scopes),
        }


def write_scores(score_file: ScoreFile, path: str | Path) -> None:
    _write_json(Path(path), score_file.to_dict())


def read_scores(path: str | Path) -> ScoreFile:
    path = Path(path)
    if not path.is_file():
        raise MissingFile(str(path))
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    try:
        parts = [(s["id"], s["length"]) for s in data["segments"]]
        ge_vals = np.asarray(data["ge"], dtype=np.float64)
        score_vals = np.asarray(data["scores"], dtype=np.float64)
        flags = tuple(data.get("degenerate_scopes", []))
        config = data.get("config", {})
    except (KeyError, TypeError) as exc:
        raise ParseError(f"{path}: bad score file: {exc}") from exc
    segments = []
    pos = 0
    for seg_id, length in parts:
        segments.append(Segment(seg_id, pos, int(length)))
        pos += int(length)
    ge = ScoreSeries(ge_vals, tuple(segments))
    scores = ScoreSeries(score_vals, tuple(segments))
    return ScoreFile(config=config, ge=ge, scores=scores, degenerate_scopes=flags)
