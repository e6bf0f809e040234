"""Standalone SVG renderings of :class:`~mixlm.diagnostics.PlotSeries`."""
from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 640, 480
MARGIN = 60


def _scale(lo, hi, out_lo, out_hi):
    if hi == lo:
        lo, hi = lo - 1.0, hi + 1.0
    return lambda v: out_lo + (v - lo) * (out_hi - out_lo) / (hi - lo)


def _frame(title, x_label, y_label, body, x_range, y_range):
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<line x1="{MARGIN}" y1="{HEIGHT - MARGIN}" x2="{WIDTH - MARGIN}" y2="{HEIGHT - MARGIN}" stroke="black"/>',
        f'<line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" y2="{HEIGHT - MARGIN}" stroke="black"/>',
        f'<text x="{WIDTH / 2}" y="{HEIGHT - 15}" text-anchor="middle" font-size="14">{escape(x_label)}</text>',
        f'<text x="18" y="{HEIGHT / 2}" text-anchor="middle" font-size="14" '
        f'transform="rotate(-90 18 {HEIGHT / 2})">{escape(y_label)}</text>',
        f'<text x="{MARGIN}" y="{HEIGHT - MARGIN + 16}" font-size="10">{x_range[0]:.4g}</text>',
        f'<text x="{WIDTH - MARGIN}" y="{HEIGHT - MARGIN + 16}" font-size="10" text-anchor="end">{x_range[1]:.4g}</text>',
        f'<text x="{MARGIN - 4}" y="{HEIGHT - MARGIN}" font-size="10" text-anchor="end">{y_range[0]:.4g}</text>',
        f'<text x="{MARGIN - 4}" y="{MARGIN + 10}" font-size="10" text-anchor="end">{y_range[1]:.4g}</text>',
    ]
    if title:
        parts.append(f'<text x="{WIDTH / 2}" y="30" text-anchor="middle" font-size="16">{escape(title)}</text>')
    parts.extend(body)
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def scatter_svg(x, y, x_label="x", y_label="y", title="") -> str:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xr = (float(x.min()), float(x.max())) if x.size else (0.0, 1.0)
    yr = (float(y.min()), float(y.max())) if y.size else (0.0, 1.0)
    sx = _scale(*xr, MARGIN + 10, WIDTH - MARGIN - 10)
    sy = _scale(*yr, HEIGHT - MARGIN - 10, MARGIN + 10)
    body = [f'<circle cx="{sx(a):.2f}" cy="{sy(b):.2f}" r="3" fill="none" stroke="black"/>'
            for a, b in zip(x, y)]
    return _frame(title, x_label, y_label, body, xr, yr)


def histogram_svg(left, right, counts, x_label="x", y_label="count", title="") -> str:
    xr = (float(np.min(left)), float(np.max(right)))
    yr = (0.0, float(max(np.max(counts), 1)))
    sx = _scale(*xr, MARGIN, WIDTH - MARGIN)
    sy = _scale(*yr, HEIGHT - MARGIN, MARGIN + 10)
    body = []
    for lo, hi, c in zip(left, right, counts):
        top = sy(c)
        body.append(f'<rect x="{sx(lo):.2f}" y="{top:.2f}" width="{sx(hi) - sx(lo):.2f}" '
                    f'height="{HEIGHT - MARGIN - top:.2f}" fill="lightgray" stroke="black"/>')
    return _frame(title, x_label, y_label, body, xr, yr)


def series_svg(series, title="") -> str:
    d = series.data
    if series.kind == "histogram":
        return histogram_svg(d[:, 0], d[:, 1], d[:, 2], series.x_label, series.y_label, title)
    return scatter_svg(d[:, 0], d[:, 1], series.x_label, series.y_label, title)
