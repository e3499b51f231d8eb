"""Linear variogram model ``V = c0 + b*h`` fitted by (weighted) least squares."""
from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .variogram import EmpiricalVariogram

# recorded in run metadata next to every percentage
PCT_MODES = {
    "adjusted": "adjusted mean-square ratio: 100*(1 - (SSres/(n-2))/(SStot/(n-1))), clamped to [0, 100]",
    "plain": "plain ratio: 100*(1 - SSres/SStot), clamped to [0, 100]",
}
PCT_CONVENTION = PCT_MODES["adjusted"]


class FitError(ValueError):
    pass


@dataclass(frozen=True)
class LinearVariogramFit:
    c0: float
    b: float
    pct_explained: float
    n_bins: int
    weighted: bool
    warnings: tuple[str, ...] = ()
    pct_mode: str = "adjusted"

    def predict(self, h):
        return self.c0 + self.b * np.asarray(h, dtype=float)


def _weights(v: EmpiricalVariogram, weighted: bool) -> np.ndarray:
    if not weighted:
        return np.ones(len(v))
    w = v.n
    # equal pair counts are the unweighted problem; use unit weights so the
    # two modes agree to the last bit
    if np.all(w == w[0]):
        return np.ones(len(v))
    return w


def _check(v: EmpiricalVariogram) -> None:
    if len(v) < 3:
        raise FitError(f"need at least 3 bins for a linear fit, got {len(v)}")
    h = v.h
    if np.all(h == h[0]):
        raise FitError("degenerate design: all bins share the same lag")


def fit_linear(
    v: EmpiricalVariogram, weighted: bool = True, pct_mode: str = "adjusted"
) -> LinearVariogramFit:
    """Least-squares line through the bins, weights = pair counts when
    ``weighted``. The intercept is not constrained; a negative nugget is kept
    and flagged in ``warnings``.

    ``pct_mode`` selects the variance-explained convention, see ``PCT_MODES``.
    """
    if pct_mode not in PCT_MODES:
        raise ValueError(f"unknown pct_mode {pct_mode!r}")
    _check(v)
    h, y = v.h, v.v
    w = _weights(v, weighted)
    sw = w.sum()
    hbar = (w * h).sum() / sw
    ybar = (w * y).sum() / sw
    dh = h - hbar
    sxx = (w * dh * dh).sum()
    if not sxx > 0:
        raise FitError("degenerate design: zero lag spread")
    b = (w * dh * (y - ybar)).sum() / sxx
    c0 = ybar - b * hbar
    notes = ("negative nugget",) if c0 < 0 else ()
    pct = _pct(h, y, w, c0, b, pct_mode)
    return LinearVariogramFit(float(c0), float(b), pct, len(v), bool(weighted), notes, pct_mode)


def _pct(h, y, w, c0, b, mode="adjusted") -> float:
    n = len(y)
    ybar = (w * y).sum() / w.sum()
    ss_tot = (w * (y - ybar) ** 2).sum()
    if ss_tot == 0:
        return 0.0
    ss_res = (w * (y - (c0 + b * h)) ** 2).sum()
    if mode == "adjusted":
        pct = 100.0 * (1.0 - (ss_res / (n - 2)) / (ss_tot / (n - 1)))
    else:
        pct = 100.0 * (1.0 - ss_res / ss_tot)
    return float(min(100.0, max(0.0, pct)))


def percent_variance_explained(v: EmpiricalVariogram, fit: LinearVariogramFit) -> float:
    _check(v)
    return _pct(v.h, v.v, _weights(v, fit.weighted), fit.c0, fit.b, fit.pct_mode)


FITS_HEADER = "year,variable,k,n_bins,c0,b,pct,weighted"


def format_fit_row(year, variable, k, fit: LinearVariogramFit) -> str:
    return (f"{year},{variable},{k},{fit.n_bins},{fit.c0:.10g},{fit.b:.10g},"
            f"{fit.pct_explained:.10g},{str(fit.weighted).lower()}")


def format_fits(rows: Iterable[tuple[object, str, object, LinearVariogramFit]]) -> str:
    buf = io.StringIO()
    buf.write(FITS_HEADER + "\n")
    for year, variable, k, fit in rows:
        buf.write(format_fit_row(year, variable, k, fit) + "\n")
    return buf.getvalue()


def parse_fits(text: str) -> list[dict]:
    lines = [ln for ln in text.replace("\r\n", "\n").split("\n") if ln.strip()]
    if not lines or lines[0].strip() != FITS_HEADER:
        raise FitError(f"expected header {FITS_HEADER!r}")
    out = []
    for ln in lines[1:]:
        year, variable, k, n_bins, c0, b, pct, weighted = ln.split(",")
        out.append(dict(
            year=year, variable=variable, k=k,
            fit=LinearVariogramFit(float(c0), float(b), float(pct), int(n_bins), weighted == "true"),
        ))
    return out
