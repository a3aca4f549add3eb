"""Report serialization and deterministic SVG plots.

Plots are plain SVG 1.1 text assembled by hand: identical inputs produce
byte-identical files (no timestamps, no library-dependent output). The
linear axis mapping of every panel is written into the file as comments.

Reports serialize to JSON (round-trips through ``read_report``) or to a
long-format tab-separated table with the fixed column order

    section  row  metric  key  value

where empty cells are the literal string NA.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import EmptySeries, MissingFile, ParseError, TooFewPoints
from .metrics import EvalReport
from .series import LabelSeries, ScoreSeries

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf")
_SHADE = "#f5b8b8"
_MARGIN_LEFT = 56.0
_MARGIN_RIGHT = 16.0
_PANEL_WIDTH = 880.0
_PANEL_HEIGHT = 170.0
_PANEL_GAP = 44.0
_MARGIN_TOP = 34.0
_MARGIN_BOTTOM = 40.0


def _fmt(v: float) -> str:
    return f"{v:.2f}"


@dataclass(frozen=True)
class PlotSpec:
    """Curve plot: one stacked panel per named series, shared frame axis.

    Contiguous runs of abnormal labels shade the background of every panel;
    dashed vertical lines separate segments.
    """

    series: tuple[tuple[str, ScoreSeries], ...]
    labels: LabelSeries | None = None
    title: str = ""
    x_label: str = "frame"

    def __post_init__(self):
        if not self.series:
            raise EmptySeries("plot needs at least one series")
        first = self.series[0][1]
        if len(first) == 0:
            raise EmptySeries("plot series has no frames")
        for _, s in self.series[1:]:
            if not first.same_structure(s):
                raise EmptySeries("plot series must share segment structure")
        if self.labels is not None and not first.same_structure(self.labels):
            raise EmptySeries("plot labels must share the series structure")


def _label_runs(values: np.ndarray) -> list[tuple[int, int]]:
    """Maximal runs of label 1 as [start, end) frame ranges."""
    runs = []
    start = None
    for i, v in enumerate(values):
        if v == 1 and start is None:
            start = i
        elif v != 1 and start is not None:
            runs.append((start, i))
            start = None
    if start is not None:
        runs.append((start, len(values)))
    return runs


def emit_curve_plot(spec: PlotSpec) -> str:
    """Render the plot spec to SVG text."""
    n = len(spec.series[0][1])
    panels = len(spec.series)
    width = _MARGIN_LEFT + _PANEL_WIDTH + _MARGIN_RIGHT
    height = _MARGIN_TOP + panels * _PANEL_HEIGHT + (panels - 1) * _PANEL_GAP + _MARGIN_BOTTOM

    def x_of(i: int) -> float:
        if n == 1:
            return _MARGIN_LEFT + _PANEL_WIDTH / 2.0
        return _MARGIN_LEFT + i * (_PANEL_WIDTH / (n - 1))

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_fmt(width)}" height="{_fmt(height)}" '
        f'viewBox="0 0 {_fmt(width)} {_fmt(height)}">',
        f"<!-- x axis: frame index i in [0, {n - 1}] maps linearly to "
        f"[{_fmt(x_of(0))}, {_fmt(x_of(max(n - 1, 0)))}] -->",
    ]
    if spec.title:
        out.append(
            f'<text x="{_fmt(_MARGIN_LEFT)}" y="20" font-family="sans-serif" '
            f'font-size="14">{spec.title}</text>'
        )
    runs = _label_runs(spec.labels.values) if spec.labels is not None else []
    boundaries = [seg.start for seg in spec.series[0][1].segments[1:]]

    for p, (name, series) in enumerate(spec.series):
        top = _MARGIN_TOP + p * (_PANEL_HEIGHT + _PANEL_GAP)
        bottom = top + _PANEL_HEIGHT
        lo = float(series.values.min())
        hi = float(series.values.max())
        if hi == lo:
            lo -= 0.5
            hi += 0.5
        span = hi - lo

        def y_of(v: float) -> float:
            return bottom - (v - lo) * (_PANEL_HEIGHT / span)

        out.append(
            f"<!-- panel {p} ({name}): value v in [{lo!r}, {hi!r}] maps linearly to "
            f"y [{_fmt(bottom)}, {_fmt(top)}] -->"
        )
        for start, end in runs:
            x0 = x_of(start)
            x1 = x_of(end - 1)
            out.append(
                f'<rect x="{_fmt(x0)}" y="{_fmt(top)}" width="{_fmt(x1 - x0)}" '
                f'height="{_fmt(_PANEL_HEIGHT)}" fill="{_SHADE}"/>'
            )
        for b in boundaries:
            xb = x_of(b)
            out.append(
                f'<line x1="{_fmt(xb)}" y1="{_fmt(top)}" x2="{_fmt(xb)}" '
                f'y2="{_fmt(bottom)}" stroke="#777777" stroke-dasharray="4,3"/>'
            )
        out.append(
            f'<rect x="{_fmt(_MARGIN_LEFT)}" y="{_fmt(top)}" width="{_fmt(_PANEL_WIDTH)}" '
            f'height="{_fmt(_PANEL_HEIGHT)}" fill="none" stroke="#000000"/>'
        )
        color = _PALETTE[p % len(_PALETTE)]
        points = " ".join(
            f"{_fmt(x_of(i))},{_fmt(y_of(float(v)))}" for i, v in enumerate(series.values)
        )
        out.append(
            f'<polyline points="{points}" fill="none" stroke="{color}" stroke-width="1.2"/>'
        )
        out.append(
            f'<text x="{_fmt(_MARGIN_LEFT)}" y="{_fmt(top - 6)}" '
            f'font-family="sans-serif" font-size="12" fill="{color}">{name}</text>'
        )
        out.append(
            f'<text x="4" y="{_fmt(top + 12)}" font-family="sans-serif" '
            f'font-size="10">{hi:.4g}</text>'
        )
        out.append(
            f'<text x="4" y="{_fmt(bottom)}" font-family="sans-serif" '
            f'font-size="10">{lo:.4g}</text>'
        )
    out.append(
        f'<text x="{_fmt(_MARGIN_LEFT + _PANEL_WIDTH / 2)}" y="{_fmt(height - 12)}" '
        f'font-family="sans-serif" font-size="12">{spec.x_label}</text>'
    )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_curve_plot(spec: PlotSpec, path: str | Path) -> None:
    Path(path).write_text(emit_curve_plot(spec))


def emit_sweep_plot(
    sizes: tuple[int, ...], curves: tuple[tuple[str, tuple[float | None, ...]], ...]
) -> str:
    """AUC against square block size, one polyline per dataset."""
    if len(sizes) < 2:
        raise TooFewPoints(f"sweep plot needs at least 2 sizes, got {len(sizes)}")
    if not curves:
        raise TooFewPoints("sweep plot needs at least one curve")
    for name, values in curves:
        if len(values) != len(sizes):
            raise TooFewPoints(f"curve {name!r} has {len(values)} values for {len(sizes)} sizes")
        if sum(v is not None for v in values) < 2:
            raise TooFewPoints(f"curve {name!r} has fewer than 2 plottable points")

    width = _MARGIN_LEFT + _PANEL_WIDTH + _MARGIN_RIGHT
    height = _MARGIN_TOP + _PANEL_HEIGHT + _MARGIN_BOTTOM
    top, bottom = _MARGIN_TOP, _MARGIN_TOP + _PANEL_HEIGHT
    lo_s, hi_s = float(min(sizes)), float(max(sizes))
    plotted = [v for _, vals in curves for v in vals if v is not None]
    lo_v, hi_v = min(plotted), max(plotted)
    if hi_v == lo_v:
        lo_v -= 0.05
        hi_v += 0.05
    pad = 0.05 * (hi_v - lo_v)
    lo_v -= pad
    hi_v += pad

    def x_of(s: float) -> float:
        return _MARGIN_LEFT + (s - lo_s) * (_PANEL_WIDTH / (hi_s - lo_s))

    def y_of(v: float) -> float:
        return bottom - (v - lo_v) * (_PANEL_HEIGHT / (hi_v - lo_v))

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_fmt(width)}" height="{_fmt(height)}" '
        f'viewBox="0 0 {_fmt(width)} {_fmt(height)}">',
        f"<!-- x axis: block size s in [{lo_s!r}, {hi_s!r}] maps linearly to "
        f"[{_fmt(x_of(lo_s))}, {_fmt(x_of(hi_s))}] -->",
        f"<!-- y axis: AUC v in [{lo_v!r}, {hi_v!r}] maps linearly to "
        f"y [{_fmt(bottom)}, {_fmt(top)}] -->",
        f'<rect x="{_fmt(_MARGIN_LEFT)}" y="{_fmt(top)}" width="{_fmt(_PANEL_WIDTH)}" '
        f'height="{_fmt(_PANEL_HEIGHT)}" fill="none" stroke="#000000"/>',
    ]
    for s in sizes:
        xs = x_of(float(s))
        out.append(
            f'<line x1="{_fmt(xs)}" y1="{_fmt(bottom)}" x2="{_fmt(xs)}" '
            f'y2="{_fmt(bottom + 4)}" stroke="#000000"/>'
        )
        out.append(
            f'<text x="{_fmt(xs)}" y="{_fmt(bottom + 16)}" font-family="sans-serif" '
            f'font-size="10" text-anchor="middle">{s}</text>'
        )
    for ci, (name, values) in enumerate(curves):
        color = _PALETTE[ci % len(_PALETTE)]
        points = " ".join(
            f"{_fmt(x_of(float(s)))},{_fmt(y_of(v))}"
            for s, v in zip(sizes, values)
            if v is not None
        )
        out.append(
            f'<polyline points="{points}" fill="none" stroke="{color}" stroke-width="1.5"/>'
        )
        out.append(
            f'<text x="{_fmt(_MARGIN_LEFT + 8 + 120 * ci)}" y="{_fmt(top - 8)}" '
            f'font-family="sans-serif" font-size="12" fill="{color}">{name}</text>'
        )
    out.append(
        f'<text x="4" y="{_fmt(top + 12)}" font-family="sans-serif" font-size="10">'
        f"{hi_v:.4g}</text>"
    )
    out.append(
        f'<text x="4" y="{_fmt(bottom)}" font-family="sans-serif" font-size="10">'
        f"{lo_v:.4g}</text>"
    )
    out.append(
        f'<text x="{_fmt(_MARGIN_LEFT + _PANEL_WIDTH / 2)}" y="{_fmt(height - 8)}" '
        f'font-family="sans-serif" font-size="12">block size</text>'
    )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_sweep_plot(
    sizes: tuple[int, ...],
    curves: tuple[tuple[str, tuple[float | None, ...]], ...],
    path: str | Path,
) -> None:
    Path(path).write_text(emit_sweep_plot(sizes, curves))


# ---------------------------------------------------------------------------
# Report files

_NA = "NA"


def _cell(value) -> str:
    if value is None:
        return _NA
    if isinstance(value, float):
        return repr(value)
    return str(value)


def report_table(report: EvalReport) -> str:
    """Long-format TSV rendering with columns: section, row, metric, key, value."""
    lines = ["section\trow\tmetric\tkey\tvalue"]

    def add(section: str, row: str, metric: str, key, value) -> None:
        lines.append("\t".join([section, row, metric, _cell(key), _cell(value)]))

    for key in sorted(report.config):
        add("config", _NA, key, _NA, report.config[key])
    for r in report.rows:
        add("metrics", r.name, "auc", _NA, r.auc)
        add("metrics", r.name, "saliency", _NA, r.saliency)
        add("metrics", r.name, "correlation", _NA, r.correlation)
        for seg_id, level in r.normal_levels:
            add("metrics", r.name, "normal_level", seg_id, level)
        for seg_a, seg_b, ratio in r.ratios:
            add("metrics", r.name, "ratio", f"{seg_a}/{seg_b}", ratio)
        for metric, error in r.errors:
            add("errors", r.name, metric, _NA, error)
    for p in report.sweep:
        add("sweep", f"{p.height}x{p.width}", "auc", _NA, p.auc)
        if p.error is not None:
            add("sweep", f"{p.height}x{p.width}", "error", _NA, p.error)
    for scope in report.degenerate_scopes:
        add("flags", _NA, "degenerate_range", _NA, scope)
    return "\n".join(lines) + "\n"


def write_report(report: EvalReport, path: str | Path, fmt: str = "json") -> None:
    """Serialize a report deterministically as JSON or a TSV table."""
    path = Path(path)
    if fmt == "json":
        path.write_text(json.dumps(report.to_dict(), indent=1, sort_keys=True) + "\n")
    elif fmt == "table":
        path.write_text(report_table(report))
    else:
        raise ParseError(f"unknown report format {fmt!r}")


def read_report(path: str | Path) -> EvalReport:
    path = Path(path)
    if not path.is_file():
        raise MissingFile(str(path))
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    try:
        return EvalReport.from_dict(data)
    except (KeyError, TypeError) as exc:
        raise ParseError(f"{path}: bad report: {exc}") from exc
