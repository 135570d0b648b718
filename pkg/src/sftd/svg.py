"""Minimal SVG output: barcodes as horizontal segments, matrices as heatmaps."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

DEGREE_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]


def _fmt(x: float) -> str:
    return f"{x:.2f}".rstrip("0").rstrip(".")


def barcode_svg(bars_by_degree: dict[int, list[tuple[float, float]]], title: str = "",
                width: int = 640, row: int = 8) -> str:
    """One horizontal segment per bar, grouped by degree; infinite deaths run to the edge."""
    ends = [x for bars in bars_by_degree.values() for b, d in bars for x in (b, d) if math.isfinite(x)]
    lo, hi = (min(ends), max(ends)) if ends else (0.0, 1.0)
    if hi == lo:
        hi = lo + 1.0
    left, right, top = 50, width - 20, 30
    scale = (right - left) / (hi - lo)
    x_of = lambda v: left + (min(v, hi) - lo) * scale if math.isfinite(v) else right

    parts = []
    y = top
    for k in sorted(bars_by_degree):
        color = DEGREE_COLORS[k % len(DEGREE_COLORS)]
        parts.append(f'<text x="4" y="{y + row}" font-size="10" fill="{color}">H{k}</text>')
        for b, d in sorted(bars_by_degree[k]):
            y += row
            dash = ' stroke-dasharray="4 2"' if not math.isfinite(d) else ""
            parts.append(
                f'<line x1="{_fmt(x_of(b))}" y1="{y}" x2="{_fmt(x_of(d))}" y2="{y}" '
                f'stroke="{color}" stroke-width="{row * 0.6:.1f}"{dash}/>'
            )
        y += 2 * row
    height = y + 30
    axis = [
        f'<line x1="{left}" y1="{height - 25}" x2="{right}" y2="{height - 25}" stroke="black"/>',
        f'<text x="{left}" y="{height - 10}" font-size="10">{_fmt(lo)}</text>',
        f'<text x="{right}" y="{height - 10}" font-size="10" text-anchor="end">{_fmt(hi)}</text>',
    ]
    head = f'<text x="{width / 2}" y="16" font-size="12" text-anchor="middle">{escape(title)}</text>'
    return _document(width, height, [head, *parts, *axis])


def heatmap_svg(matrix, cell: int = 12, title: str = "") -> str:
    n = len(matrix)
    peak = max((max(row) for row in matrix), default=0.0) or 1.0
    parts = [f'<text x="4" y="14" font-size="12">{escape(title)}</text>']
    for i, row in enumerate(matrix):
        for j, v in enumerate(row):
            shade = int(255 * (1 - v / peak))
            parts.append(
                f'<rect x="{j * cell}" y="{20 + i * cell}" width="{cell}" height="{cell}" '
                f'fill="rgb({shade},{shade},{shade})"/>'
            )
    return _document(n * cell, 20 + n * cell, parts)


def _document(width, height, parts) -> str:
    body = "\n  ".join(parts)
    return (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}">\n'
        f'  <rect width="100%" height="100%" fill="white"/>\n  {body}\n</svg>\n'
    )
