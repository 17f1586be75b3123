"""Minimal standalone SVG line plots.

Output depends only on the input numbers, so identical inputs give
byte-identical files.
"""

from dataclasses import dataclass
from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 640, 400
MARGIN = dict(left=70, right=20, top=20, bottom=50)
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f")


@dataclass
class Series:
    label: str
    x: np.ndarray
    y: np.ndarray
    band: np.ndarray = None  # half-width of a shaded band around y


def nice_ticks(lo, hi, n=5):
    """Round tick positions covering ``[lo, hi]``."""
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / max(n, 1)
    mag = 10 ** np.floor(np.log10(raw))
    step = mag * min((1, 2, 2.5, 5, 10), key=lambda m: abs(m * mag - raw))
    start = np.ceil(lo / step - 1e-9) * step
    ticks = np.arange(start, hi + step * 1e-9, step)
    return [float(round(t, 12)) for t in ticks]


def _fmt(v):
    return f"{v:.2f}".rstrip("0").rstrip(".")


def _tick_label(v):
    return f"{v:.6g}"


def render(series, xlabel="t", ylabel="", title=""):
    """Return SVG text for the given :class:`Series` list."""
    if not series:
        raise ValueError("nothing to plot")
    xs = np.concatenate([np.asarray(s.x, float) for s in series])
    lows = [np.asarray(s.y, float) - (0 if s.band is None else np.asarray(s.band, float)) for s in series]
    highs = [np.asarray(s.y, float) + (0 if s.band is None else np.asarray(s.band, float)) for s in series]
    x0, x1 = float(np.nanmin(xs)), float(np.nanmax(xs))
    y0, y1 = float(np.nanmin(np.concatenate(lows))), float(np.nanmax(np.concatenate(highs)))
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    pad = 0.05 * (y1 - y0)
    y0, y1 = y0 - pad, y1 + pad

    left, top = MARGIN["left"], MARGIN["top"]
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def px(x):
        return left + (np.asarray(x, float) - x0) / (x1 - x0) * pw

    def py(y):
        return top + (1 - (np.asarray(y, float) - y0) / (y1 - y0)) * ph

    def points(x, y):
        return " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in zip(px(x), py(y)))

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{WIDTH / 2:g}" y="14" text-anchor="middle">{escape(title)}</text>')
    out.append(f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>')
    for t in nice_ticks(x0, x1):
        if x0 <= t <= x1:
            X = _fmt(float(px(t)))
            out.append(f'<line class="tick" x1="{X}" y1="{top + ph}" x2="{X}" y2="{top + ph + 5}" stroke="black"/>')
            out.append(f'<text x="{X}" y="{top + ph + 18}" text-anchor="middle">{_tick_label(t)}</text>')
    for t in nice_ticks(y0, y1):
        if y0 <= t <= y1:
            Y = _fmt(float(py(t)))
            out.append(f'<line class="tick" x1="{left - 5}" y1="{Y}" x2="{left}" y2="{Y}" stroke="black"/>')
            out.append(f'<text x="{left - 8}" y="{Y}" text-anchor="end" dominant-baseline="middle">{_tick_label(t)}</text>')
    out.append(f'<text x="{left + pw / 2:g}" y="{HEIGHT - 10}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="15" y="{top + ph / 2:g}" text-anchor="middle" '
               f'transform="rotate(-90 15 {top + ph / 2:g})">{escape(ylabel)}</text>')

    for i, s in enumerate(series):
        color = PALETTE[i % len(PALETTE)]
        if s.band is not None:
            x = np.asarray(s.x, float)
            upper = np.asarray(s.y, float) + np.asarray(s.band, float)
            lower = np.asarray(s.y, float) - np.asarray(s.band, float)
            poly = points(np.concatenate([x, x[::-1]]), np.concatenate([upper, lower[::-1]]))
            out.append(f'<polygon class="band" points="{poly}" fill="{color}" fill-opacity="0.25" stroke="none"/>')
        out.append(f'<polyline points="{points(s.x, s.y)}" fill="none" stroke="{color}" stroke-width="1.5"/>')

    lx, ly = left + pw - 150, top + 12
    out.append('<g class="legend">')
    for i, s in enumerate(series):
        color = PALETTE[i % len(PALETTE)]
        yy = ly + 16 * i
        out.append(f'<line x1="{lx}" y1="{yy}" x2="{lx + 20}" y2="{yy}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 26}" y="{yy + 4}">{escape(s.label)}</text>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_svg(path, series, **kw):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(render(series, **kw))
    return path
