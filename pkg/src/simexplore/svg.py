"""Minimal deterministic SVG 1.1 emitter for static plot export.

Identical input always yields byte-identical output: no ids, no
timestamps, fixed number formatting, and ordered iteration only. Formats
beyond svg are delegated to an optional external converter command that
reads svg on stdin.
"""

from __future__ import annotations

import math
import subprocess
from xml.sax.saxutils import escape, quoteattr

from .errors import EmptyPlot, PlotError
from .plotdata import (
    BlandAltmanData,
    ForestPoint,
    HeatTile,
    NestedLoopData,
    PairedData,
    PlotSpec,
    RidgeGroup,
    ZipStripe,
)

THEMES = {
    "default": {
        "background": "#ffffff", "ink": "#222222", "grid": "#dddddd",
        "palette": ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"),
        "accent": "#d62728", "muted": "#8faabf", "font": "Helvetica, Arial, sans-serif",
    },
    "minimal": {
        "background": "#ffffff", "ink": "#444444", "grid": "#f0f0f0",
        "palette": ("#555555", "#999999", "#bbbbbb", "#777777", "#333333", "#aaaaaa"),
        "accent": "#000000", "muted": "#cccccc", "font": "Helvetica, Arial, sans-serif",
    },
    "dark": {
        "background": "#1e1e24", "ink": "#e8e8e8", "grid": "#3a3a44",
        "palette": ("#56b4e9", "#e69f00", "#009e73", "#cc79a7", "#f0e442", "#d55e00"),
        "accent": "#f0e442", "muted": "#5a5a66", "font": "Helvetica, Arial, sans-serif",
    },
}

_MARGIN = {"left": 64.0, "right": 16.0, "top": 20.0, "bottom": 48.0}


def _fmt(x: float) -> str:
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return format(x, ".6g")


class SvgDoc:
    def __init__(self, width: float, height: float, background: str):
        self.width = width
        self.height = height
        self.parts: list[str] = [
            '<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
            f'width="{_fmt(width)}" height="{_fmt(height)}" '
            f'viewBox="0 0 {_fmt(width)} {_fmt(height)}">\n',
            f'<rect x="0" y="0" width="{_fmt(width)}" height="{_fmt(height)}" '
            f'fill="{background}"/>\n',
        ]

    def el(self, tag: str, text: str | None = None, **attrs) -> None:
        rendered = " ".join(f"{k.replace('_', '-')}={quoteattr(str(v))}"
                            for k, v in attrs.items())
        if text is None:
            self.parts.append(f"<{tag} {rendered}/>\n")
        else:
            self.parts.append(f"<{tag} {rendered}>{escape(text)}</{tag}>\n")

    def tobytes(self) -> bytes:
        return ("".join(self.parts) + "</svg>\n").encode("utf-8")


def _nice_ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if not (math.isfinite(lo) and math.isfinite(hi)):
        return []
    if lo == hi:
        lo, hi = lo - 1.0, hi + 1.0
    raw = (hi - lo) / max(n, 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        step = mult * mag
        if raw <= step:
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(t) < 1e-12 * step else t)
        t += step
    return ticks


class _Frame:
    """Linear data-to-pixel mapping inside the plot margins."""

    def __init__(self, spec: PlotSpec, xdom: tuple[float, float],
                 ydom: tuple[float, float], pad: float = 0.05):
        self.spec = spec
        self.x0 = _MARGIN["left"]
        self.x1 = spec.width - _MARGIN["right"]
        self.y0 = spec.height - _MARGIN["bottom"]
        self.y1 = _MARGIN["top"]
        self.xdom = self._padded(xdom, pad)
        self.ydom = self._padded(ydom, pad)

    @staticmethod
    def _padded(dom: tuple[float, float], pad: float) -> tuple[float, float]:
        lo, hi = dom
        if lo == hi:
            lo, hi = lo - 1.0, hi + 1.0
        span = hi - lo
        return lo - pad * span, hi + pad * span

    def x(self, v: float) -> float:
        lo, hi = self.xdom
        return self.x0 + (v - lo) / (hi - lo) * (self.x1 - self.x0)

    def y(self, v: float) -> float:
        lo, hi = self.ydom
        return self.y0 + (v - lo) / (hi - lo) * (self.y1 - self.y0)


def _draw_axes(doc: SvgDoc, frame: _Frame, theme: dict,
               x_ticks: list[float] | None = None,
               y_ticks: list[float] | None = None,
               x_tick_labels: list[str] | None = None,
               y_tick_labels: list[str] | None = None) -> None:
    spec = frame.spec
    ink = theme["ink"]
    doc.el("line", x1=_fmt(frame.x0), y1=_fmt(frame.y0), x2=_fmt(frame.x1),
           y2=_fmt(frame.y0), stroke=ink, stroke_width="1")
    doc.el("line", x1=_fmt(frame.x0), y1=_fmt(frame.y0), x2=_fmt(frame.x0),
           y2=_fmt(frame.y1), stroke=ink, stroke_width="1")
    if x_ticks is None:
        x_ticks = _nice_ticks(*frame.xdom)
    if y_ticks is None:
        y_ticks = _nice_ticks(*frame.ydom)
    xlabels = x_tick_labels or [_fmt(round(t, 10)) for t in x_ticks]
    ylabels = y_tick_labels or [_fmt(round(t, 10)) for t in y_ticks]
    for t, label in zip(x_ticks, xlabels):
        px = frame.x(t)
        doc.el("line", x1=_fmt(px), y1=_fmt(frame.y0), x2=_fmt(px),
               y2=_fmt(frame.y0 + 4), stroke=ink, stroke_width="1")
        doc.el("text", label, x=_fmt(px), y=_fmt(frame.y0 + 16),
               fill=ink, font_size="11", text_anchor="middle",
               font_family=theme["font"])
    for t, label in zip(y_ticks, ylabels):
        py = frame.y(t)
        doc.el("line", x1=_fmt(frame.x0 - 4), y1=_fmt(py), x2=_fmt(frame.x0),
               y2=_fmt(py), stroke=ink, stroke_width="1")
        doc.el("text", label, x=_fmt(frame.x0 - 7), y=_fmt(py + 3.5),
               fill=ink, font_size="11", text_anchor="end",
               font_family=theme["font"])
    if spec.xlab:
        doc.el("text", spec.xlab, x=_fmt((frame.x0 + frame.x1) / 2),
               y=_fmt(spec.height - 10), fill=ink, font_size="13",
               text_anchor="middle", font_family=theme["font"])
    if spec.ylab:
        cx, cy = 16.0, (frame.y0 + frame.y1) / 2
        doc.el("text", spec.ylab, x=_fmt(cx), y=_fmt(cy), fill=ink,
               font_size="13", text_anchor="middle", font_family=theme["font"],
               transform=f"rotate(-90 {_fmt(cx)} {_fmt(cy)})")


def _palette_color(theme: dict, i: int) -> str:
    palette = theme["palette"]
    return palette[i % len(palette)]


def _lerp_color(c0: str, c1: str, t: float) -> str:
    def rgb(c):
        return int(c[1:3], 16), int(c[3:5], 16), int(c[5:7], 16)
    a, b = rgb(c0), rgb(c1)
    mixed = tuple(round(a[i] + (b[i] - a[i]) * t) for i in range(3))
    return "#{:02x}{:02x}{:02x}".format(*mixed)


def _dgm_label(dgm: tuple[str, ...]) -> str:
    return ",".join(dgm) if dgm else "all"


# --- per-kind renderers ---

def _render_scatter(doc: SvgDoc, spec: PlotSpec, data: PairedData, theme: dict) -> None:
    xs = [p.a for p in data.points]
    ys = [p.b for p in data.points]
    frame = _Frame(spec, (min(xs), max(xs)), (min(ys), max(ys)))
    _draw_axes(doc, frame, theme)
    lo = max(frame.xdom[0], frame.ydom[0])
    hi = min(frame.xdom[1], frame.ydom[1])
    if lo < hi:
        doc.el("line", x1=_fmt(frame.x(lo)), y1=_fmt(frame.y(lo)),
               x2=_fmt(frame.x(hi)), y2=_fmt(frame.y(hi)),
               stroke=theme["muted"], stroke_width="1", stroke_dasharray="4 3")
    dgms = []
    for p in data.points:
        if p.dgm not in dgms:
            dgms.append(p.dgm)
    for p in data.points:
        doc.el("circle", cx=_fmt(round(frame.x(p.a), 2)),
               cy=_fmt(round(frame.y(p.b), 2)), r="2",
               fill=_palette_color(theme, dgms.index(p.dgm)), fill_opacity="0.6")


def _render_bland_altman(doc: SvgDoc, spec: PlotSpec, data: BlandAltmanData,
                         theme: dict) -> None:
    ys = list(data.diffs)
    if data.lower_limit is not None:
        ys += [data.lower_limit, data.upper_limit]
    frame = _Frame(spec, (min(data.means), max(data.means)), (min(ys), max(ys)))
    _draw_axes(doc, frame, theme)
    for level, color in ((data.mean_diff, theme["accent"]),
                         (data.lower_limit, theme["muted"]),
                         (data.upper_limit, theme["muted"])):
        if level is None:
            continue
        doc.el("line", x1=_fmt(frame.x0), y1=_fmt(frame.y(level)),
               x2=_fmt(frame.x1), y2=_fmt(frame.y(level)), stroke=color,
               stroke_width="1", stroke_dasharray="5 3")
    for m, d in zip(data.means, data.diffs):
        doc.el("circle", cx=_fmt(round(frame.x(m), 2)), cy=_fmt(round(frame.y(d), 2)),
               r="2", fill=_palette_color(theme, 0), fill_opacity="0.6")


def _render_ridgeline(doc: SvgDoc, spec: PlotSpec, groups: list[RidgeGroup],
                      theme: dict) -> None:
    lo = min(g.sample[0] for g in groups)
    hi = max(g.sample[-1] for g in groups)
    for g in groups:
        if g.grid:
            lo = min(lo, g.grid[0])
            hi = max(hi, g.grid[-1])
    frame = _Frame(spec, (lo, hi), (0.0, float(len(groups))), pad=0.02)
    labels = [g.key.label() for g in groups]
    _draw_axes(doc, frame, theme,
               y_ticks=[i + 0.5 for i in range(len(groups))], y_tick_labels=labels)
    row = (frame.y(0.0) - frame.y(1.0))
    for i, g in enumerate(groups):
        base = frame.y(float(i))
        color = _palette_color(theme, i)
        if g.density:
            peak = max(g.density) or 1.0
            pts = [f"{_fmt(round(frame.x(g.grid[0]), 2))},{_fmt(round(base, 2))}"]
            for x, d in zip(g.grid, g.density):
                y = base - (d / peak) * row * 0.9
                pts.append(f"{_fmt(round(frame.x(x), 2))},{_fmt(round(y, 2))}")
            pts.append(f"{_fmt(round(frame.x(g.grid[-1]), 2))},{_fmt(round(base, 2))}")
            doc.el("polygon", points=" ".join(pts), fill=color, fill_opacity="0.55",
                   stroke=color, stroke_width="1")
        else:
            for v in g.sample:
                px = frame.x(v)
                doc.el("line", x1=_fmt(round(px, 2)), y1=_fmt(round(base, 2)),
                       x2=_fmt(round(px, 2)), y2=_fmt(round(base - row * 0.5, 2)),
                       stroke=color, stroke_width="1")


def _forest_rows(points: list[ForestPoint]) -> list[tuple[str, ForestPoint]]:
    return [(f"{_dgm_label(p.dgm)} | {p.method}" if p.dgm else p.method, p)
            for p in points]


def _render_forest(doc: SvgDoc, spec: PlotSpec, points: list[ForestPoint],
                   theme: dict, lolly: bool = False) -> None:
    rows = _forest_rows(points)
    xs = [p.lower for _, p in rows] + [p.upper for _, p in rows]
    if lolly:
        xs.append(0.0)
    frame = _Frame(spec, (min(xs), max(xs)), (0.0, float(len(rows))))
    _draw_axes(doc, frame, theme,
               y_ticks=[i + 0.5 for i in range(len(rows))],
               y_tick_labels=[label for label, _ in rows])
    methods = []
    for _, p in rows:
        if p.method not in methods:
            methods.append(p.method)
    if lolly and frame.xdom[0] <= 0.0 <= frame.xdom[1]:
        doc.el("line", x1=_fmt(frame.x(0.0)), y1=_fmt(frame.y0),
               x2=_fmt(frame.x(0.0)), y2=_fmt(frame.y1),
               stroke=theme["muted"], stroke_width="1")
    for i, (_, p) in enumerate(rows):
        cy = frame.y(i + 0.5)
        color = _palette_color(theme, methods.index(p.method))
        if lolly:
            doc.el("line", x1=_fmt(frame.x(0.0)), y1=_fmt(round(cy, 2)),
                   x2=_fmt(round(frame.x(p.value), 2)), y2=_fmt(round(cy, 2)),
                   stroke=color, stroke_width="1.5")
        doc.el("line", x1=_fmt(round(frame.x(p.lower), 2)), y1=_fmt(round(cy, 2)),
               x2=_fmt(round(frame.x(p.upper), 2)), y2=_fmt(round(cy, 2)),
               stroke=color, stroke_width="2")
        doc.el("circle", cx=_fmt(round(frame.x(p.value), 2)), cy=_fmt(round(cy, 2)),
               r="4", fill=color)


def _render_heat(doc: SvgDoc, spec: PlotSpec, tiles: list[HeatTile], theme: dict) -> None:
    methods = []
    dgms = []
    for t in tiles:
        if t.method not in methods:
            methods.append(t.method)
        if t.dgm not in dgms:
            dgms.append(t.dgm)
    frame = _Frame(spec, (0.0, float(len(methods))), (0.0, float(len(dgms))), pad=0.0)
    _draw_axes(doc, frame, theme,
               x_ticks=[i + 0.5 for i in range(len(methods))], x_tick_labels=methods,
               y_ticks=[i + 0.5 for i in range(len(dgms))],
               y_tick_labels=[_dgm_label(d) for d in dgms])
    values = [t.value for t in tiles]
    vmin, vmax = min(values), max(values)
    span = (vmax - vmin) or 1.0
    for t in tiles:
        ci = methods.index(t.method)
        ri = dgms.index(t.dgm)
        frac = (t.value - vmin) / span
        doc.el("rect", x=_fmt(round(frame.x(ci), 2)),
               y=_fmt(round(frame.y(ri + 1.0), 2)),
               width=_fmt(round(frame.x(ci + 1.0) - frame.x(ci), 2)),
               height=_fmt(round(frame.y(ri) - frame.y(ri + 1.0), 2)),
               fill=_lerp_color(theme["muted"], theme["accent"], frac),
               stroke=theme["background"], stroke_width="1")
        doc.el("text", format(t.value, ".4g"),
               x=_fmt(round(frame.x(ci + 0.5), 2)),
               y=_fmt(round(frame.y(ri + 0.5) + 4, 2)), fill=theme["ink"],
               font_size="11", text_anchor="middle", font_family=theme["font"])


def _render_zip(doc: SvgDoc, spec: PlotSpec, stripes: list[ZipStripe],
                theme: dict) -> None:
    panels: dict[tuple[tuple[str, ...], str], list[ZipStripe]] = {}
    for s in stripes:
        panels.setdefault((s.dgm, s.method), []).append(s)
    keys = list(panels)
    methods = []
    dgms = []
    for dgm, method in keys:
        if method not in methods:
            methods.append(method)
        if dgm not in dgms:
            dgms.append(dgm)
    n_cols = len(methods)
    n_rows = len(dgms)
    inner_w = (spec.width - _MARGIN["left"] - _MARGIN["right"]) / n_cols
    inner_h = (spec.height - _MARGIN["top"] - _MARGIN["bottom"]) / n_rows
    all_lo = min(s.lower for s in stripes)
    all_hi = max(s.upper for s in stripes)
    span = (all_hi - all_lo) or 1.0
    for (dgm, method), group in panels.items():
        col = methods.index(method)
        row = dgms.index(dgm)
        px0 = _MARGIN["left"] + col * inner_w + 4
        px1 = _MARGIN["left"] + (col + 1) * inner_w - 4
        py0 = _MARGIN["top"] + (row + 1) * inner_h - 14
        py1 = _MARGIN["top"] + row * inner_h + 14
        doc.el("text", f"{_dgm_label(dgm)} | {method}",
               x=_fmt(round((px0 + px1) / 2, 2)), y=_fmt(round(py1 - 3, 2)),
               fill=theme["ink"], font_size="11", text_anchor="middle",
               font_family=theme["font"])

        def sx(v: float) -> float:
            return px0 + (v - all_lo) / span * (px1 - px0)

        for s in group:
            y = py0 - (s.rank_percentile / 100.0) * (py0 - py1)
            color = _palette_color(theme, 0) if s.covers else theme["accent"]
            doc.el("line", x1=_fmt(round(sx(s.lower), 2)), y1=_fmt(round(y, 2)),
                   x2=_fmt(round(sx(s.upper), 2)), y2=_fmt(round(y, 2)),
                   stroke=color, stroke_width="1", stroke_opacity="0.7")
        doc.el("rect", x=_fmt(round(px0, 2)), y=_fmt(round(py1, 2)),
               width=_fmt(round(px1 - px0, 2)), height=_fmt(round(py0 - py1, 2)),
               fill="none", stroke=theme["grid"], stroke_width="1")


def _render_nested_loop(doc: SvgDoc, spec: PlotSpec, data: NestedLoopData,
                        theme: dict) -> None:
    n_pos = len(data.positions)
    ys = [v for s in data.series for v in s["values"] if v is not None]
    for ribbon in data.ribbons:
        ys.extend(ribbon["y"])
    frame = _Frame(spec, (0.0, float(n_pos)), (min(ys), max(ys)))
    _draw_axes(doc, frame, theme, x_ticks=[], x_tick_labels=[])

    def step_points(values) -> str:
        pts = []
        prev = None
        for i, v in enumerate(values):
            if v is None:
                prev = None
                continue
            x0, x1 = frame.x(float(i)), frame.x(float(i + 1))
            y = frame.y(v)
            if prev is not None:
                pts.append(f"{_fmt(round(x0, 2))},{_fmt(round(prev, 2))}")
            pts.append(f"{_fmt(round(x0, 2))},{_fmt(round(y, 2))}")
            pts.append(f"{_fmt(round(x1, 2))},{_fmt(round(y, 2))}")
            prev = y
        return " ".join(pts)

    for i, series in enumerate(data.series):
        doc.el("polyline", points=step_points(series["values"]), fill="none",
               stroke=_palette_color(theme, i), stroke_width="1.5")
        first = next((j for j, v in enumerate(series["values"]) if v is not None), None)
        if first is not None:
            doc.el("text", series["method"],
                   x=_fmt(round(frame.x(first + 0.1), 2)),
                   y=_fmt(round(frame.y(series["values"][first]) - 4, 2)),
                   fill=_palette_color(theme, i), font_size="11",
                   font_family=theme["font"])
    for ribbon in data.ribbons:
        doc.el("polyline", points=step_points(ribbon["y"]), fill="none",
               stroke=theme["muted"], stroke_width="1")
        doc.el("text", f"{ribbon['factor']}: {', '.join(ribbon['levels'])}",
               x=_fmt(round(frame.x(0.0) + 2, 2)),
               y=_fmt(round(frame.y(max(ribbon["y"])) - 3, 2)),
               fill=theme["ink"], font_size="10", font_family=theme["font"])


def render_svg(spec: PlotSpec, data) -> bytes:
    """Render prepared plot data to standalone SVG bytes."""
    theme = THEMES.get(spec.theme)
    if theme is None:
        raise PlotError(f"unknown theme {spec.theme!r}; have {sorted(THEMES)}")
    empty = data is None or (hasattr(data, "__len__") and len(data) == 0)
    if empty:
        raise EmptyPlot("no data to plot")
    doc = SvgDoc(spec.width, spec.height, theme["background"])
    if spec.kind in ("scatter", "density-pairs"):
        _render_scatter(doc, spec, data, theme)
    elif spec.kind == "bland-altman":
        _render_bland_altman(doc, spec, data, theme)
    elif spec.kind == "ridgeline":
        _render_ridgeline(doc, spec, list(data), theme)
    elif spec.kind == "forest":
        _render_forest(doc, spec, list(data), theme, lolly=False)
    elif spec.kind == "lolly":
        _render_forest(doc, spec, list(data), theme, lolly=True)
    elif spec.kind == "heat":
        _render_heat(doc, spec, list(data), theme)
    elif spec.kind == "zip":
        _render_zip(doc, spec, list(data), theme)
    elif spec.kind == "nested-loop":
        _render_nested_loop(doc, spec, data, theme)
    else:
        raise PlotError(f"unknown plot kind {spec.kind!r}")
    return doc.tobytes()


def convert_svg(svg: bytes, command: list[str], timeout: float = 60.0) -> bytes:
    """Run an external converter (svg on stdin, converted bytes on stdout)."""
    try:
        proc = subprocess.run(command, input=svg, stdout=subprocess.PIPE,
                              stderr=subprocess.PIPE, timeout=timeout, check=True)
    except (OSError, subprocess.SubprocessError) as exc:
        raise PlotError(f"svg converter failed: {exc}") from exc
    return proc.stdout
