"""Minimal deterministic SVG line plots (no timestamps, fixed number formatting)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from xml.sax.saxutils import escape

WIDTH, HEIGHT = 560, 400
LEFT, RIGHT, TOP, BOTTOM = 72, 24, 36, 56
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f")


@dataclass
class Series:
    label: str
    x: list[float]
    y: list[float]
    dashed: bool = False


@dataclass
class Figure:
    title: str
    xlabel: str
    ylabel: str
    logx: bool = False
    logy: bool = False
    series: list[Series] = field(default_factory=list)

    def add(self, label, x, y, dashed=False):
        self.series.append(Series(label, [float(v) for v in x], [float(v) for v in y], dashed))
        return self


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _nice_ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step - 1e-9) * step
    ticks = []
    v = start
    while v <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(v) < 1e-12 * step else v)
        v += step
    return ticks


def _tick_label(v: float) -> str:
    if v != 0 and (abs(v) >= 1e5 or abs(v) < 1e-3):
        return f"{v:.1e}"
    return f"{v:.6g}"


def _range(values, log):
    vals = [v for v in values if math.isfinite(v) and (v > 0 or not log)]
    if log:
        vals = [math.log10(v) for v in vals]
    if not vals:
        return 0.0, 1.0
    lo, hi = min(vals), max(vals)
    if hi == lo:
        pad = 0.5 if lo == 0 else 0.1 * abs(lo)
        return lo - pad, hi + pad
    pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


def render(fig: Figure) -> str:
    xs = [v for s in fig.series for v in s.x]
    ys = [v for s in fig.series for v in s.y]
    x0, x1 = _range(xs, fig.logx)
    y0, y1 = _range(ys, fig.logy)
    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM

    def px(v):
        u = math.log10(v) if fig.logx else v
        return LEFT + (u - x0) / (x1 - x0) * pw

    def py(v):
        u = math.log10(v) if fig.logy else v
        return TOP + ph - (u - y0) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.2f}" y="22" text-anchor="middle" font-family="sans-serif" font-size="14">{escape(fig.title)}</text>',
        f'<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for axis, (lo, hi, log) in (("x", (x0, x1, fig.logx)), ("y", (y0, y1, fig.logy))):
        for t in _nice_ticks(lo, hi):
            label = _tick_label(10**t) if log else _tick_label(t)
            if axis == "x":
                X = LEFT + (t - x0) / (x1 - x0) * pw
                out.append(f'<line x1="{_fmt(X)}" y1="{TOP + ph}" x2="{_fmt(X)}" y2="{TOP + ph + 5}" stroke="black"/>')
                out.append(
                    f'<text x="{_fmt(X)}" y="{TOP + ph + 18}" text-anchor="middle" font-family="sans-serif" font-size="11">{label}</text>'
                )
            else:
                Y = TOP + ph - (t - y0) / (y1 - y0) * ph
                out.append(f'<line x1="{LEFT - 5}" y1="{_fmt(Y)}" x2="{LEFT}" y2="{_fmt(Y)}" stroke="black"/>')
                out.append(
                    f'<text x="{LEFT - 8}" y="{_fmt(Y + 4)}" text-anchor="end" font-family="sans-serif" font-size="11">{label}</text>'
                )
    out.append(
        f'<text x="{LEFT + pw / 2:.2f}" y="{HEIGHT - 14}" text-anchor="middle" font-family="sans-serif" font-size="12">{escape(fig.xlabel)}</text>'
    )
    out.append(
        f'<text x="16" y="{TOP + ph / 2:.2f}" text-anchor="middle" font-family="sans-serif" font-size="12" '
        f'transform="rotate(-90 16 {TOP + ph / 2:.2f})">{escape(fig.ylabel)}</text>'
    )
    for k, s in enumerate(fig.series):
        color = COLORS[k % len(COLORS)]
        pts = [
            (px(x), py(y))
            for x, y in zip(s.x, s.y)
            if math.isfinite(x) and math.isfinite(y) and (x > 0 or not fig.logx) and (y > 0 or not fig.logy)
        ]
        if len(pts) > 1:
            dash = ' stroke-dasharray="6 4"' if s.dashed else ""
            coords = " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in pts)
            out.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>')
        if not s.dashed:
            for a, b in pts:
                out.append(f'<circle cx="{_fmt(a)}" cy="{_fmt(b)}" r="3" fill="{color}"/>')
        ly = TOP + 14 + 16 * k
        out.append(f'<line x1="{LEFT + pw - 120}" y1="{ly}" x2="{LEFT + pw - 100}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(
            f'<text x="{LEFT + pw - 95}" y="{ly + 4}" font-family="sans-serif" font-size="11">{escape(s.label)}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def save(fig: Figure, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render(fig), encoding="utf-8")
    return path
