"""Minimal deterministic SVG scatter and line plots."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

from .fileio import atomic_write

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf")
SIZE = 480
MARGIN = 40


def render_svg(
    series: Sequence[np.ndarray],
    kind: str = "line",
    labels: Sequence[str] | None = None,
    title: str = "",
) -> str:
    """SVG text for 2-D point series.

    ``kind="line"`` draws each series as a polyline with a marker on its last
    point; ``kind="scatter"`` draws one marker per point. Output depends only
    on the inputs, so identical calls give identical bytes.
    """
    if kind not in ("line", "scatter"):
        raise ValueError(f"unknown plot kind {kind!r}")
    arrays = [np.atleast_2d(np.asarray(s, dtype=float)) for s in series]
    if not arrays or any(a.size == 0 for a in arrays):
        raise ValueError("nothing to plot")
    for a in arrays:
        if a.shape[1] != 2:
            raise ValueError("each series must be an (n, 2) array")
    pts = np.vstack(arrays)
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    span = np.where(hi - lo > 0, hi - lo, 1.0)
    inner = SIZE - 2 * MARGIN

    def xy(p):
        u = MARGIN + (p[0] - lo[0]) / span[0] * inner
        v = SIZE - MARGIN - (p[1] - lo[1]) / span[1] * inner
        return f"{u:.2f},{v:.2f}"

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">',
        f'<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="white"/>',
        f'<rect x="{MARGIN}" y="{MARGIN}" width="{inner}" height="{inner}" fill="none" stroke="#999"/>',
    ]
    if title:
        out.append(f'<text x="{SIZE // 2}" y="{MARGIN // 2}" text-anchor="middle" font-size="14">{escape(title)}</text>')
    for i, a in enumerate(arrays):
        color = PALETTE[i % len(PALETTE)]
        name = escape(labels[i]) if labels and i < len(labels) else f"series {i}"
        out.append(f'<g id="s{i}"><title>{name}</title>')
        if kind == "line" and len(a) > 1:
            path = " ".join(xy(p) for p in a)
            out.append(f'<polyline points="{path}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        marks = a[-1:] if kind == "line" else a
        for p in marks:
            cx, cy = xy(p).split(",")
            out.append(f'<circle cx="{cx}" cy="{cy}" r="4" fill="{color}"/>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_plot(series, kind: str, path: str | Path, labels=None, title: str = "") -> None:
    atomic_write(path, render_svg(series, kind, labels, title))
