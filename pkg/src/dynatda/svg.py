"""Dependency-free SVG heatmaps for 2-D integer grids."""

from __future__ import annotations

from html import escape

import numpy as np

from .invariants import INF

# monotone light-to-dark ramp, one colour per bin
RAMP = ("#fff7ec", "#fee8c8", "#fdd49e", "#fdbb84", "#fc8d59", "#ef6548", "#d7301f", "#990000")
CELL = 6
MARGIN = 40


def _bins(values: np.ndarray) -> np.ndarray:
    finite = values[values != INF]
    if finite.size == 0:
        return np.zeros(values.shape, dtype=int)
    lo, hi = int(finite.min()), int(finite.max())
    span = max(hi - lo, 1)
    safe = np.where(values == INF, lo, values).astype(np.float64)
    b = ((safe - lo) * (len(RAMP) - 1) / span).round().astype(int)
    return np.clip(b, 0, len(RAMP) - 1)


def heatmap(values: np.ndarray, title: str, row_label: str, col_label: str) -> str:
    """Rows are drawn bottom-up so the first row index sits at the origin."""
    v = np.asarray(values, dtype=np.int64)
    rows, cols = v.shape
    w = MARGIN * 2 + cols * CELL
    h = MARGIN * 2 + rows * CELL
    bins = _bins(v)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">',
        "<defs><pattern id=\"hatch\" width=\"4\" height=\"4\" patternUnits=\"userSpaceOnUse\">"
        '<rect width="4" height="4" fill="#ffffff"/><path d="M0,4 L4,0" stroke="#555555" stroke-width="1"/>'
        "</pattern></defs>",
        f'<text x="{w // 2}" y="16" font-size="12" text-anchor="middle">{escape(title)}</text>',
    ]
    for i in range(rows):
        y = MARGIN + (rows - 1 - i) * CELL
        for j in range(cols):
            x = MARGIN + j * CELL
            fill = "url(#hatch)" if v[i, j] == INF else RAMP[bins[i, j]]
            out.append(f'<rect x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="{fill}"/>')
    out.append(f'<text x="{w // 2}" y="{h - 8}" font-size="11" text-anchor="middle">{escape(col_label)}</text>')
    out.append(
        f'<text x="12" y="{h // 2}" font-size="11" text-anchor="middle" '
        f'transform="rotate(-90 12 {h // 2})">{escape(row_label)}</text>'
    )
    finite = v[v != INF]
    if finite.size:
        out.append(
            f'<text x="{w - 4}" y="16" font-size="10" text-anchor="end">'
            f"min {int(finite.min())} max {int(finite.max())}</text>"
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
