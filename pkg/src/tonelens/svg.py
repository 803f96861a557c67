"""Deterministic SVG line charts for mean-trajectory summaries.

Plain text output (no raster backend) so golden tests can diff plots
byte-for-byte. Missing mean points split a category's polyline into
separate segments; gaps are never interpolated across.
"""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

from .trajectory import MeanTrajectory

WIDTH = 640
HEIGHT = 400
MARGIN_LEFT = 56
MARGIN_RIGHT = 120
MARGIN_TOP = 32
MARGIN_BOTTOM = 40

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _fmt(value: float) -> str:
    return f"{value:.2f}"


def mean_trajectory_svg(means: list[MeanTrajectory], title: str) -> str:
    """Render one polyline per group over normalized time points.

    X is the point index (0..n-1), Y is Hz. Groups are drawn in the order
    given; rendering is a pure function of the inputs.
    """
    plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

    values = np.concatenate([m.points[~np.isnan(m.points)] for m in means]) if means else np.array([])
    if len(values):
        y_lo, y_hi = float(values.min()), float(values.max())
        if y_hi == y_lo:
            y_lo, y_hi = y_lo - 1.0, y_hi + 1.0
        pad = 0.05 * (y_hi - y_lo)
        y_lo, y_hi = y_lo - pad, y_hi + pad
    else:
        y_lo, y_hi = 0.0, 1.0
    n_points = max((len(m.points) for m in means), default=2)

    def sx(i: int) -> float:
        return MARGIN_LEFT + plot_w * i / max(n_points - 1, 1)

    def sy(v: float) -> float:
        return MARGIN_TOP + plot_h * (1.0 - (v - y_lo) / (y_hi - y_lo))

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH // 2}" y="20" text-anchor="middle" font-family="sans-serif" '
        f'font-size="14">{escape(title)}</text>',
        # axes
        f'<line x1="{MARGIN_LEFT}" y1="{MARGIN_TOP}" x2="{MARGIN_LEFT}" '
        f'y2="{HEIGHT - MARGIN_BOTTOM}" stroke="black"/>',
        f'<line x1="{MARGIN_LEFT}" y1="{HEIGHT - MARGIN_BOTTOM}" '
        f'x2="{WIDTH - MARGIN_RIGHT}" y2="{HEIGHT - MARGIN_BOTTOM}" stroke="black"/>',
        f'<text x="{MARGIN_LEFT - 8}" y="{HEIGHT - MARGIN_BOTTOM}" text-anchor="end" '
        f'font-family="sans-serif" font-size="10">{_fmt(y_lo)}</text>',
        f'<text x="{MARGIN_LEFT - 8}" y="{MARGIN_TOP + 4}" text-anchor="end" '
        f'font-family="sans-serif" font-size="10">{_fmt(y_hi)}</text>',
        f'<text x="{(MARGIN_LEFT + WIDTH - MARGIN_RIGHT) // 2}" y="{HEIGHT - 12}" '
        f'text-anchor="middle" font-family="sans-serif" font-size="11">'
        f'normalized time point</text>',
        f'<text x="14" y="{HEIGHT // 2}" text-anchor="middle" font-family="sans-serif" '
        f'font-size="11" transform="rotate(-90 14 {HEIGHT // 2})">F0 (Hz)</text>',
    ]

    for gi, mean in enumerate(means):
        color = PALETTE[gi % len(PALETTE)]
        segment: list[str] = []
        segments: list[list[str]] = []
        for i, v in enumerate(mean.points):
            if np.isnan(v):
                if segment:
                    segments.append(segment)
                    segment = []
            else:
                segment.append(f"{_fmt(sx(i))},{_fmt(sy(float(v)))}")
        if segment:
            segments.append(segment)
        for seg in segments:
            if len(seg) == 1:
                x, y = seg[0].split(",")
                parts.append(f'<circle cx="{x}" cy="{y}" r="2" fill="{color}"/>')
            else:
                parts.append(
                    f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
                    f'points="{" ".join(seg)}"/>'
                )
        ly = MARGIN_TOP + 16 * gi
        lx = WIDTH - MARGIN_RIGHT + 12
        parts.append(
            f'<line x1="{lx}" y1="{ly + 4}" x2="{lx + 18}" y2="{ly + 4}" '
            f'stroke="{color}" stroke-width="2"/>'
        )
        parts.append(
            f'<text x="{lx + 24}" y="{ly + 8}" font-family="sans-serif" '
            f'font-size="11">{escape(mean.group_key)}</text>'
        )

    parts.append("</svg>")
    return "\n".join(parts) + "\n"
