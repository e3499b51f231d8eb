"""Dependency-free SVG rendering of an empirical variogram and its linear fit.

Output is plain text with fixed number formatting, so identical inputs give
identical bytes.
"""
from __future__ import annotations

import math
from xml.sax.saxutils import escape

from .modelfit import LinearVariogramFit
from .variogram import EmpiricalVariogram

WIDTH, HEIGHT = 800, 600
MARGIN_LEFT, MARGIN_RIGHT, MARGIN_TOP, MARGIN_BOTTOM = 90, 30, 50, 70


class PlotError(ValueError):
    pass


def nice_step(span: float, target_ticks: int = 5) -> float:
    raw = span / target_ticks
    mag = 10 ** math.floor(math.log10(raw))
    for m in (1, 2, 2.5, 5, 10):
        if m * mag >= raw:
            return m * mag
    return 10 * mag


def _ticks(lo: float, hi: float) -> list[float]:
    step = nice_step(hi - lo)
    first = math.ceil(lo / step)
    out = []
    k = first
    while k * step <= hi + step * 1e-9:
        out.append(round(k * step, 10))
        k += 1
    return out


def _num(v: float) -> str:
    return f"{v:.2f}"


def _label(v: float) -> str:
    return f"{v:.10g}"


def render_variogram_svg(
    v: EmpiricalVariogram,
    fit: LinearVariogramFit,
    max_lag: float | None = None,
    title: str | None = None,
) -> str:
    if len(v) == 0:
        raise PlotError("empty variogram")
    max_lag = v.max_lag if max_lag is None else max_lag
    h, vals = v.h, v.v
    x_hi = max(max_lag, float(h.max()))
    y_top = max(float(vals.max()), fit.c0, fit.c0 + fit.b * max_lag)
    y_bot = min(0.0, fit.c0, fit.c0 + fit.b * max_lag)
    if y_top <= y_bot:
        y_top = y_bot + 1.0
    step = nice_step(y_top - y_bot)
    y_lo = math.floor(y_bot / step) * step
    y_hi = math.ceil(y_top / step) * step

    pw = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    ph = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

    def sx(x):
        return MARGIN_LEFT + pw * x / x_hi

    def sy(y):
        return MARGIN_TOP + ph * (1 - (y - y_lo) / (y_hi - y_lo))

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    if title is None:
        title = v.source_label or "Semivariogram"
    out.append(f'<text x="{WIDTH // 2}" y="30" text-anchor="middle" font-size="18">{escape(title)}</text>')

    x0, y0 = sx(0), sy(y_lo)
    out.append('<g class="axes" stroke="black" stroke-width="1">')
    out.append(f'<line x1="{_num(x0)}" y1="{_num(y0)}" x2="{_num(sx(x_hi))}" y2="{_num(y0)}"/>')
    out.append(f'<line x1="{_num(x0)}" y1="{_num(y0)}" x2="{_num(x0)}" y2="{_num(sy(y_hi))}"/>')
    out.append("</g>")

    out.append('<g class="ticks" font-size="12">')
    for t in _ticks(0.0, x_hi):
        X = sx(t)
        out.append(f'<line x1="{_num(X)}" y1="{_num(y0)}" x2="{_num(X)}" y2="{_num(y0 + 5)}" stroke="black"/>')
        out.append(f'<text x="{_num(X)}" y="{_num(y0 + 20)}" text-anchor="middle">{_label(t)}</text>')
    for t in _ticks(y_lo, y_hi):
        Y = sy(t)
        out.append(f'<line x1="{_num(x0 - 5)}" y1="{_num(Y)}" x2="{_num(x0)}" y2="{_num(Y)}" stroke="black"/>')
        out.append(f'<text x="{_num(x0 - 8)}" y="{_num(Y + 4)}" text-anchor="end">{_label(t)}</text>')
    out.append("</g>")
    out.append(f'<text x="{_num(MARGIN_LEFT + pw / 2)}" y="{HEIGHT - 20}" text-anchor="middle" '
               f'font-size="14">lag h</text>')
    out.append(f'<text x="20" y="{_num(MARGIN_TOP + ph / 2)}" text-anchor="middle" font-size="14" '
               f'transform="rotate(-90 20 {_num(MARGIN_TOP + ph / 2)})">semivariance</text>')

    out.append(f'<line class="fit" x1="{_num(sx(0))}" y1="{_num(sy(fit.c0))}" '
               f'x2="{_num(sx(max_lag))}" y2="{_num(sy(fit.c0 + fit.b * max_lag))}" '
               f'stroke="red" stroke-width="2"/>')
    out.append('<g class="bins" fill="steelblue">')
    for hb, vb in zip(h, vals):
        out.append(f'<circle cx="{_num(sx(hb))}" cy="{_num(sy(vb))}" r="4"/>')
    out.append("</g>")
    out.append(f'<text x="{WIDTH - MARGIN_RIGHT}" y="{MARGIN_TOP + 15}" text-anchor="end" font-size="12">'
               f'V = {_label(fit.c0)} + {_label(fit.b)} h ({fit.pct_explained:.1f}% explained)</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
