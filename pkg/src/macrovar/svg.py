"""Minimal hand-written SVG line charts for impulse responses.

The canvas is a fixed 640x480 viewBox. The plot area spans x in [70, 610]
and y in [50, 420]; horizon h maps linearly from [0, H] onto the x range and
values map linearly from [ymin, ymax] (padded 5%, always including zero) onto
the y range, inverted so larger values sit higher.
"""
from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 640, 480
LEFT, RIGHT, TOP, BOTTOM = 70.0, 610.0, 50.0, 420.0


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def irf_svg(h, point, lower=None, upper=None, title: str = "", ylabel: str = "") -> str:
    h = np.asarray(h, dtype=float)
    point = np.asarray(point, dtype=float)
    vals = [point, np.zeros(1)]
    if lower is not None and upper is not None:
        lower, upper = np.asarray(lower, float), np.asarray(upper, float)
        vals += [lower, upper]
    lo, hi = float(min(v.min() for v in vals)), float(max(v.max() for v in vals))
    pad = 0.05 * (hi - lo) if hi > lo else 1.0
    lo, hi = lo - pad, hi + pad
    hmax = float(h.max()) if h.size and h.max() > 0 else 1.0

    def X(v):
        return LEFT + (RIGHT - LEFT) * v / hmax

    def Y(v):
        return BOTTOM - (BOTTOM - TOP) * (v - lo) / (hi - lo)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" '
        f'width="{WIDTH}" height="{HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.0f}" y="28" text-anchor="middle" font-family="sans-serif" '
        f'font-size="16">{escape(title)}</text>',
    ]
    if lower is not None and upper is not None:
        pts = [f"{_fmt(X(a))},{_fmt(Y(b))}" for a, b in zip(h, upper)]
        pts += [f"{_fmt(X(a))},{_fmt(Y(b))}" for a, b in zip(h[::-1], lower[::-1])]
        parts.append(f'<polygon points="{" ".join(pts)}" fill="#9ecae1" fill-opacity="0.5" stroke="none"/>')
    parts.append(
        f'<line x1="{_fmt(LEFT)}" y1="{_fmt(Y(0.0))}" x2="{_fmt(RIGHT)}" y2="{_fmt(Y(0.0))}" '
        'stroke="black" stroke-dasharray="4,3"/>'
    )
    line = " ".join(f"{_fmt(X(a))},{_fmt(Y(b))}" for a, b in zip(h, point))
    parts.append(f'<polyline points="{line}" fill="none" stroke="#08519c" stroke-width="2"/>')
    # axes and ticks
    parts.append(f'<line x1="{_fmt(LEFT)}" y1="{_fmt(TOP)}" x2="{_fmt(LEFT)}" y2="{_fmt(BOTTOM)}" stroke="black"/>')
    parts.append(f'<line x1="{_fmt(LEFT)}" y1="{_fmt(BOTTOM)}" x2="{_fmt(RIGHT)}" y2="{_fmt(BOTTOM)}" stroke="black"/>')
    for v in h:
        parts.append(
            f'<text x="{_fmt(X(v))}" y="{_fmt(BOTTOM + 18)}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{int(v)}</text>'
        )
    for v in np.linspace(lo, hi, 5):
        parts.append(
            f'<text x="{_fmt(LEFT - 6)}" y="{_fmt(Y(v) + 4)}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{v:.3g}</text>'
        )
    parts.append(
        f'<text x="{(LEFT + RIGHT) / 2:.0f}" y="{HEIGHT - 20}" text-anchor="middle" '
        'font-family="sans-serif" font-size="12">horizon (quarters)</text>'
    )
    parts.append(
        f'<text x="16" y="{(TOP + BOTTOM) / 2:.0f}" transform="rotate(-90 16 {(TOP + BOTTOM) / 2:.0f})" '
        f'text-anchor="middle" font-family="sans-serif" font-size="12">{escape(ylabel)}</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
