"""Tiny deterministic SVG writer for line plots, heatmaps and scatter plots.

Output depends only on the data and the plot spec (fixed number formatting,
no ids or timestamps), so rerunning an experiment reproduces the files byte
for byte.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 640, 420
MARGIN = dict(left=70, right=150, top=40, bottom=55)
PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"]


class PlotError(ValueError):
    pass


def _f(v: float) -> str:
    return f"{v:.2f}"


def _tick(v: float) -> str:
    return f"{v:.3g}"


def read_table(path) -> tuple[list[str], list[dict]]:
    with open(path, newline="") as fh:
        rows = [r for r in fh if not r.startswith("#")]
    reader = csv.DictReader(rows)
    return list(reader.fieldnames or []), list(reader)


def _column(rows, header, name) -> np.ndarray:
    if name not in header:
        raise PlotError(f"column {name!r} not found; available: {', '.join(header)}")
    try:
        return np.array([float(r[name]) for r in rows])
    except ValueError as exc:
        raise PlotError(f"column {name!r} is not numeric") from exc


class _Axes:
    def __init__(self, xs, ys, logx=False, logy=False):
        self.logx, self.logy = logx, logy
        self.x0, self.x1 = self._range(xs, logx)
        self.y0, self.y1 = self._range(ys, logy)
        self.left, self.top = MARGIN["left"], MARGIN["top"]
        self.w = WIDTH - MARGIN["left"] - MARGIN["right"]
        self.h = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    @staticmethod
    def _range(v, log):
        v = np.asarray(v, float)
        v = v[np.isfinite(v)]
        if log:
            v = v[v > 0]
        if v.size == 0:
            return (0.0, 1.0)
        lo, hi = (np.log10(v.min()), np.log10(v.max())) if log else (v.min(), v.max())
        if hi == lo:
            lo, hi = lo - 0.5, hi + 0.5
        pad = 0.0 if log else 0.04 * (hi - lo)
        return float(lo - pad), float(hi + pad)

    def px(self, x):
        x = math.log10(x) if self.logx else x
        return self.left + (x - self.x0) / (self.x1 - self.x0) * self.w

    def py(self, y):
        y = math.log10(y) if self.logy else y
        return self.top + self.h - (y - self.y0) / (self.y1 - self.y0) * self.h

    def ok(self, x, y):
        return (math.isfinite(x) and math.isfinite(y)
                and (not self.logx or x > 0) and (not self.logy or y > 0))

    def frame(self, xlabel, ylabel) -> list[str]:
        out = [f'<rect x="{self.left}" y="{self.top}" width="{self.w}" height="{self.h}" '
               'fill="none" stroke="black"/>']
        for axis in "xy":
            lo, hi = (self.x0, self.x1) if axis == "x" else (self.y0, self.y1)
            log = self.logx if axis == "x" else self.logy
            for t in np.linspace(lo, hi, 5):
                val = 10**t if log else t
                if axis == "x":
                    p = self.px(val)
                    out.append(f'<line x1="{_f(p)}" y1="{self.top + self.h}" x2="{_f(p)}" '
                               f'y2="{self.top + self.h + 5}" stroke="black"/>')
                    out.append(f'<text x="{_f(p)}" y="{self.top + self.h + 18}" '
                               f'text-anchor="middle" font-size="11">{_tick(val)}</text>')
                else:
                    p = self.py(val)
                    out.append(f'<line x1="{self.left - 5}" y1="{_f(p)}" x2="{self.left}" '
                               f'y2="{_f(p)}" stroke="black"/>')
                    out.append(f'<text x="{self.left - 8}" y="{_f(p + 4)}" '
                               f'text-anchor="end" font-size="11">{_tick(val)}</text>')
        out.append(f'<text x="{self.left + self.w / 2:.2f}" y="{HEIGHT - 12}" '
                   f'text-anchor="middle" font-size="13">{escape(xlabel)}</text>')
        out.append(f'<text x="16" y="{self.top + self.h / 2:.2f}" text-anchor="middle" font-size="13" '
                   f'transform="rotate(-90 16 {self.top + self.h / 2:.2f})">{escape(ylabel)}</text>')
        return out


def _document(body: list[str], title: str, width=WIDTH, height=HEIGHT) -> str:
    head = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}">',
            f'<rect width="{width}" height="{height}" fill="white"/>']
    if title:
        head.append(f'<text x="{width / 2:.2f}" y="22" text-anchor="middle" font-size="15">'
                    f'{escape(title)}</text>')
    return "\n".join(head + body + ["</svg>"]) + "\n"


def _legend(entries) -> list[str]:
    out = []
    x = WIDTH - MARGIN["right"] + 12
    for k, (label, color, dashed) in enumerate(entries):
        y = MARGIN["top"] + 14 + 18 * k
        dash = ' stroke-dasharray="5,3"' if dashed else ""
        out.append(f'<line x1="{x}" y1="{y}" x2="{x + 22}" y2="{y}" stroke="{color}" stroke-width="2"{dash}/>')
        out.append(f'<text x="{x + 28}" y="{y + 4}" font-size="11">{escape(label)}</text>')
    return out


def line_plot(header, rows, spec) -> str:
    """One polyline per (y column, group value).  Rows are averaged per x value
    within a series, so raw per-replication tables plot as seed averages."""
    xcol = spec["x"]
    ycols = spec["y"] if isinstance(spec["y"], list) else [spec["y"]]
    group = spec.get("group")
    x = _column(rows, header, xcol)
    gvals = [r[group] for r in rows] if group else [""] * len(rows)
    if group and group not in header:
        raise PlotError(f"column {group!r} not found")
    groups = list(dict.fromkeys(gvals))
    series = []
    for yc in ycols:
        y = _column(rows, header, yc)
        for g in groups:
            m = np.array([gv == g for gv in gvals])
            xs = np.unique(x[m])
            ys = np.array([y[m & (x == xv)].mean() for xv in xs])
            label = yc if not group else (f"{group}={g}" if len(ycols) == 1 else f"{yc}, {group}={g}")
            series.append((label, xs, ys, ycols.index(yc) % 2 == 1))
    ax = _Axes(np.concatenate([s[1] for s in series]), np.concatenate([s[2] for s in series]),
               spec.get("logx", False), spec.get("logy", False))
    body = ax.frame(spec.get("xlabel", xcol), spec.get("ylabel", ", ".join(ycols)))
    legend = []
    for k, (label, xs, ys, dashed) in enumerate(series):
        color = PALETTE[k % len(PALETTE)]
        pts = " ".join(f"{_f(ax.px(a))},{_f(ax.py(b))}" for a, b in zip(xs, ys) if ax.ok(a, b))
        dash = ' stroke-dasharray="5,3"' if dashed else ""
        body.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="2"{dash}/>')
        legend.append((label, color, dashed))
    return _document(body + _legend(legend), spec.get("title", ""))


def heatmap(header, rows, spec) -> str:
    """Grayscale image, one ``rect`` per cell, from a long-format table."""
    r = _column(rows, header, spec.get("row", "row")).astype(int)
    c = _column(rows, header, spec.get("col", "col")).astype(int)
    v = _column(rows, header, spec["value"])
    nr, nc = r.max() + 1, c.max() + 1
    cell = max(2.0, min(360.0 / nr, 480.0 / nc))
    width = int(math.ceil(nc * cell)) + 40
    height = int(math.ceil(nr * cell)) + 60
    lo, hi = float(np.nanmin(v)), float(np.nanmax(v))
    span = hi - lo if hi > lo else 1.0
    body = []
    for ri, ci, vi in sorted(zip(r, c, v), key=lambda t: (t[0], t[1])):
        g = int(round(255 * (vi - lo) / span))
        body.append(f'<rect x="{_f(20 + ci * cell)}" y="{_f(40 + ri * cell)}" width="{_f(cell)}" '
                    f'height="{_f(cell)}" fill="rgb({g},{g},{g})"/>')
    body.append(f'<text x="20" y="{height - 6}" font-size="11">{escape(spec["value"])}: '
                f'black {_tick(lo)}, white {_tick(hi)}</text>')
    return _document(body, spec.get("title", ""), width, height)


def scatter(header, rows, spec, background=None) -> str:
    """Points (optionally numbered) over an optional background of small dots."""
    x = _column(rows, header, spec["x"])
    y = _column(rows, header, spec["y"])
    labels = [r[spec["label"]] for r in rows] if spec.get("label") else None
    if spec.get("label") and spec["label"] not in header:
        raise PlotError(f"column {spec['label']!r} not found")
    bx = by = np.empty(0)
    if background is not None:
        bx = _column(background[1], background[0], spec["x"])
        by = _column(background[1], background[0], spec["y"])
    ax = _Axes(np.concatenate([x, bx]), np.concatenate([y, by]))
    body = ax.frame(spec.get("xlabel", spec["x"]), spec.get("ylabel", spec["y"]))
    for a, b in zip(bx, by):
        body.append(f'<circle cx="{_f(ax.px(a))}" cy="{_f(ax.py(b))}" r="1.5" fill="black"/>')
    for k, (a, b) in enumerate(zip(x, y)):
        px, py = ax.px(a), ax.py(b)
        body.append(f'<path d="M{_f(px - 5)},{_f(py - 5)}L{_f(px + 5)},{_f(py + 5)}'
                    f'M{_f(px - 5)},{_f(py + 5)}L{_f(px + 5)},{_f(py - 5)}" stroke="red" stroke-width="2"/>')
        if labels:
            body.append(f'<text x="{_f(px + 6)}" y="{_f(py - 6)}" font-size="10" fill="red">'
                        f'{escape(labels[k])}</text>')
    return _document(body, spec.get("title", ""))


def render_plot(source, spec: dict, out) -> Path:
    """Render ``spec`` from the CSV table at ``source`` into the SVG file ``out``.

    ``spec["type"]`` is ``line``, ``heatmap`` or ``scatter``.  Missing
    columns raise :class:`PlotError`.
    """
    header, rows = read_table(source)
    if not rows:
        raise PlotError(f"{source} has no data rows")
    kind = spec.get("type", "line")
    if kind == "line":
        text = line_plot(header, rows, spec)
    elif kind == "heatmap":
        text = heatmap(header, rows, spec)
    elif kind == "scatter":
        bg = None
        if spec.get("background"):
            bg = read_table(Path(source).parent / spec["background"])
        text = scatter(header, rows, spec, bg)
    else:
        raise PlotError(f"unknown plot type {kind!r}")
    out = Path(out)
    out.write_text(text)
    return out
