"""Minimal SVG output: line charts with error bars and the Chimera layout view."""

from __future__ import annotations

from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from .chimera import HORIZONTAL, ChimeraTopology, Embedding

PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f")
REVERSED = "blue"
KEPT = "red"
IDLE = "lightgray"


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def line_chart(series: dict, path, title: str = "", xlabel: str = "", ylabel: str = "", width=640, height=420):
    """``series`` maps label -> (xs, ys) or (xs, ys, yerr)."""
    left, right, top, bottom = 70, 150, 40, 50
    pw, ph = width - left - right, height - top - bottom
    xs_all = np.concatenate([np.asarray(s[0], float) for s in series.values()]) if series else np.zeros(1)
    lo_hi = []
    for s in series.values():
        y = np.asarray(s[1], float)
        err = np.asarray(s[2], float) if len(s) > 2 else np.zeros_like(y)
        lo_hi += [np.nanmin(y - err), np.nanmax(y + err)]
    x0, x1 = float(xs_all.min()), float(xs_all.max())
    y0, y1 = (min(lo_hi), max(lo_hi)) if lo_hi else (0.0, 1.0)
    if x1 == x0:
        x1 = x0 + 1
    if y1 == y0:
        y0, y1 = y0 - 1, y1 + 1

    def px(x):
        return left + (x - x0) / (x1 - x0) * pw

    def py(y):
        return top + ph - (y - y0) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="11">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<text x="{width / 2}" y="20" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
        f'<text x="{left + pw / 2}" y="{height - 10}" text-anchor="middle">{escape(xlabel)}</text>',
        f'<text x="15" y="{top + ph / 2}" text-anchor="middle" transform="rotate(-90 15 {top + ph / 2})">{escape(ylabel)}</text>',
    ]
    for frac in np.linspace(0, 1, 5):
        xv, yv = x0 + frac * (x1 - x0), y0 + frac * (y1 - y0)
        out.append(f'<text x="{_fmt(px(xv))}" y="{top + ph + 15}" text-anchor="middle">{xv:.3g}</text>')
        out.append(f'<text x="{left - 5}" y="{_fmt(py(yv) + 4)}" text-anchor="end">{yv:.3g}</text>')
    if y0 < 0 < y1:
        out.append(f'<line x1="{left}" x2="{left + pw}" y1="{_fmt(py(0))}" y2="{_fmt(py(0))}" stroke="gray" stroke-dasharray="4"/>')
    for k, (label, s) in enumerate(series.items()):
        color = PALETTE[k % len(PALETTE)]
        xs, ys = np.asarray(s[0], float), np.asarray(s[1], float)
        pts = " ".join(f"{_fmt(px(x))},{_fmt(py(y))}" for x, y in zip(xs, ys))
        out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        if len(s) > 2:
            for x, y, e in zip(xs, ys, np.asarray(s[2], float)):
                out.append(
                    f'<line x1="{_fmt(px(x))}" x2="{_fmt(px(x))}" y1="{_fmt(py(y - e))}" y2="{_fmt(py(y + e))}" stroke="{color}"/>'
                )
        ly = top + 15 + 16 * k
        out.append(f'<line x1="{left + pw + 10}" x2="{left + pw + 30}" y1="{ly}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{left + pw + 35}" y="{ly + 4}">{escape(str(label))}</text>')
    out.append("</svg>")
    Path(path).write_text("\n".join(out) + "\n")


def render_layout(topo: ChimeraTopology, embedding: Embedding, mask, path, cell=60):
    """Draw the cells touched by ``embedding``; in-use qubits blue if reversed, red otherwise.

    ``mask`` is indexed like the embedded model (ascending in-use qubit ids).
    """
    bits = np.asarray(getattr(mask, "array", mask), dtype=bool)
    qubits = embedding.qubits
    if bits.shape != (len(qubits),):
        raise ValueError(f"mask length {bits.size} does not match {len(qubits)} in-use qubits")
    state = dict(zip(qubits, bits.tolist()))
    rows = max((topo.coordinates(q)[0] for q in qubits), default=0) + 1
    cols = max((topo.coordinates(q)[1] for q in qubits), default=0) + 1
    t = topo.t
    pad = 20
    width, height = cols * cell + 2 * pad, rows * cell + 2 * pad

    def pos(q):
        r, c, side, k = topo.coordinates(q)
        step = (cell - 20) / max(t - 1, 1)
        if side == HORIZONTAL:
            return pad + c * cell + cell - 14, pad + r * cell + 10 + k * step
        return pad + c * cell + 14, pad + r * cell + 10 + k * step

    drawn = {q for q in range(topo.num_qubits) if topo.coordinates(q)[0] < rows and topo.coordinates(q)[1] < cols}
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        '<rect width="100%" height="100%" fill="white"/>',
    ]
    for u, v in sorted(topo.edges):
        if u in drawn and v in drawn:
            (xa, ya), (xb, yb) = pos(u), pos(v)
            out.append(f'<line x1="{_fmt(xa)}" y1="{_fmt(ya)}" x2="{_fmt(xb)}" y2="{_fmt(yb)}" stroke="#ddd" stroke-width="0.6"/>')
    for q in sorted(drawn):
        x, y = pos(q)
        color = IDLE if q not in state else REVERSED if state[q] else KEPT
        out.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="4" fill="{color}"/>')
    out.append("</svg>")
    Path(path).write_text("\n".join(out) + "\n")
