"""Minimal self-contained SVG renderers for the report CLI.

Deliberately tiny: bar and line charts with axis labels, no dependencies.
The CSV output is the analysis artifact; these are inspection aids.
"""

from __future__ import annotations

from typing import Sequence

WIDTH, HEIGHT = 640, 400
MARGIN = 60


def _scale(values: Sequence[float]) -> tuple[float, float]:
    lo, hi = min(values), max(values)
    if lo == hi:
        lo, hi = lo - 1.0, hi + 1.0
    return lo, hi


def _header(title: str) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2}" y="24" text-anchor="middle" font-size="16">{title}</text>',
    ]


def bar_chart(labels: Sequence[str], values: Sequence[float], path: str, title: str) -> None:
    lo, hi = _scale(list(values) + [0.0])
    plot_w = WIDTH - 2 * MARGIN
    plot_h = HEIGHT - 2 * MARGIN
    parts = _header(title)
    zero_y = MARGIN + plot_h * (hi - 0.0) / (hi - lo)
    parts.append(
        f'<line x1="{MARGIN}" y1="{zero_y:.1f}" x2="{WIDTH - MARGIN}" y2="{zero_y:.1f}" stroke="black"/>'
    )
    n = len(values)
    bar_w = plot_w / max(n, 1) * 0.7
    for i, (label, v) in enumerate(zip(labels, values)):
        x = MARGIN + plot_w * (i + 0.15) / n
        y = MARGIN + plot_h * (hi - max(v, 0.0)) / (hi - lo)
        h = abs(v) / (hi - lo) * plot_h
        parts.append(
            f'<rect x="{x:.1f}" y="{y:.1f}" width="{bar_w:.1f}" height="{h:.1f}" fill="#4472a8"/>'
        )
        parts.append(
            f'<text x="{x + bar_w / 2:.1f}" y="{HEIGHT - MARGIN / 2}" text-anchor="middle" '
            f'font-size="12">{label}</text>'
        )
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8") as f:
        f.write("\n".join(parts))


def line_chart(xs: Sequence[float], ys: Sequence[float], path: str, title: str) -> None:
    xlo, xhi = _scale(xs)
    ylo, yhi = _scale(list(ys) + [0.0])
    plot_w = WIDTH - 2 * MARGIN
    plot_h = HEIGHT - 2 * MARGIN
    pts = []
    for x, y in zip(xs, ys):
        px = MARGIN + plot_w * (x - xlo) / (xhi - xlo)
        py = MARGIN + plot_h * (yhi - y) / (yhi - ylo)
        pts.append(f"{px:.1f},{py:.1f}")
    parts = _header(title)
    parts.append(
        f'<polyline points="{" ".join(pts)}" fill="none" stroke="#4472a8" stroke-width="2"/>'
    )
    for value, anchor, x in ((xlo, "start", MARGIN), (xhi, "end", WIDTH - MARGIN)):
        parts.append(
            f'<text x="{x}" y="{HEIGHT - MARGIN / 2}" text-anchor="{anchor}" font-size="12">{value:g}</text>'
        )
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8") as f:
        f.write("\n".join(parts))
