"""Dependency-free SVG line plots on a fixed 800 x 500 canvas."""

from __future__ import annotations

from html import escape
from pathlib import Path

import numpy as np

__all__ = ["line_plot", "write_svg"]

WIDTH, HEIGHT = 800, 500
MARGIN = {"left": 80, "right": 30, "top": 40, "bottom": 60}
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _ticks(lo, hi, count=5):
    return np.linspace(lo, hi, count)


def _segments(x, y):
    """Split at non-finite points so gaps are not bridged."""
    good = np.isfinite(x) & np.isfinite(y)
    out, cur = [], []
    for xi, yi, g in zip(x, y, good):
        if g:
            cur.append((xi, yi))
        elif cur:
            out.append(cur)
            cur = []
    if cur:
        out.append(cur)
    return out


def line_plot(series, *, title="", xlabel="", ylabel="", hlines=()):
    """Return SVG text plotting ``series``.

    Parameters
    ----------
    series : sequence of (x, y, label)
    hlines : sequence of (y, label)
        Dashed horizontal reference lines.
    """
    xs = np.concatenate([np.asarray(s[0], float) for s in series])
    ys = np.concatenate([np.asarray(s[1], float) for s in series]
                        + [np.asarray([h[0] for h in hlines], float)])
    xs, ys = xs[np.isfinite(xs)], ys[np.isfinite(ys)]
    x0, x1 = (float(xs.min()), float(xs.max())) if xs.size else (0.0, 1.0)
    y0, y1 = (float(ys.min()), float(ys.max())) if ys.size else (0.0, 1.0)
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    pad = 0.05 * (y1 - y0) if y1 > y0 else 0.5
    y0, y1 = y0 - pad, y1 + pad
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def X(v):
        return MARGIN["left"] + (v - x0) / (x1 - x0) * pw

    def Y(v):
        return MARGIN["top"] + (y1 - v) / (y1 - y0) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
           f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
           f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
           f'<text x="{WIDTH / 2}" y="24" text-anchor="middle" font-size="15">{escape(title)}</text>']
    bx, by = MARGIN["left"], MARGIN["top"]
    out.append(f'<rect x="{bx}" y="{by}" width="{pw}" height="{ph}" fill="none" stroke="black"/>')
    for t in _ticks(x0, x1):
        out.append(f'<line x1="{X(t):.2f}" y1="{by + ph}" x2="{X(t):.2f}" y2="{by + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{X(t):.2f}" y="{by + ph + 18}" text-anchor="middle">{t:.4g}</text>')
    for t in _ticks(y0, y1):
        out.append(f'<line x1="{bx - 5}" y1="{Y(t):.2f}" x2="{bx}" y2="{Y(t):.2f}" stroke="black"/>')
        out.append(f'<text x="{bx - 8}" y="{Y(t) + 4:.2f}" text-anchor="end">{t:.4g}</text>')
    out.append(f'<text x="{bx + pw / 2}" y="{HEIGHT - 15}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="18" y="{by + ph / 2}" text-anchor="middle" '
               f'transform="rotate(-90 18 {by + ph / 2})">{escape(ylabel)}</text>')
    for y, label in hlines:
        if y0 <= y <= y1:
            out.append(f'<line x1="{bx}" y1="{Y(y):.2f}" x2="{bx + pw}" y2="{Y(y):.2f}" '
                       f'stroke="gray" stroke-dasharray="6,4"/>')
            out.append(f'<text x="{bx + pw - 4}" y="{Y(y) - 4:.2f}" text-anchor="end" '
                       f'fill="gray">{escape(label)}</text>')
    for i, (x, y, label) in enumerate(series):
        color = COLORS[i % len(COLORS)]
        for seg in _segments(np.asarray(x, float), np.asarray(y, float)):
            pts = " ".join(f"{X(a):.2f},{Y(b):.2f}" for a, b in seg)
            out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        ly = by + 16 + 16 * i
        out.append(f'<line x1="{bx + 10}" y1="{ly - 4}" x2="{bx + 30}" y2="{ly - 4}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{bx + 36}" y="{ly}">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_svg(path, svg_text):
    path = Path(path)
    path.write_text(svg_text, encoding="utf-8")
    return path
