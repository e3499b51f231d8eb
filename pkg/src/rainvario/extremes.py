"""Annual k-day maximum precipitation (MaxI_0k) and its start day (DiaM_0k)."""
from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .ingest import DailySeries, StationYearSample

WINDOWS = (1, 2, 3, 4, 5)

# day_of_year is the first day of the maximal window
DAY_CONVENTION = "window_start"


class ExtremesError(ValueError):
    pass


@dataclass(frozen=True)
class AnnualExtreme:
    station_code: int
    year: int
    window_days: int
    max_accum: float
    day_of_year: int
    # True when missing days were counted as 0 mm
    has_gaps: bool = False


def window_sums(values: np.ndarray, k: int) -> np.ndarray:
    """Sums of every length-``k`` run, accumulated left to right."""
    n = len(values) - k + 1
    acc = values[0:n].copy()
    for j in range(1, k):
        acc += values[j:j + n]
    return acc


def annual_window_extreme(series: DailySeries, year: int, k: int) -> AnnualExtreme:
    if k not in WINDOWS:
        raise ExtremesError(f"window length must be in 1..5, got {k}")
    if not series.covers_any(year):
        raise ExtremesError(
            f"year {year} outside the span of station {series.station_code} "
            f"({series.start_date}..{series.end_date})"
        )
    vals = series.year_values(year)
    missing = np.isnan(vals)
    if missing.any():
        vals = np.where(missing, 0.0, vals)
    sums = window_sums(vals, k)
    start = int(np.argmax(sums))  # first occurrence wins ties
    return AnnualExtreme(
        series.station_code, year, k, float(sums[start]), start + 1, bool(missing.any())
    )


def extremes_matrix(
    sample: StationYearSample, series: Sequence[DailySeries]
) -> list[AnnualExtreme]:
    """All five window extremes for every sampled station, ordered by (code, k)."""
    by_code = {s.station_code: s for s in series}
    out = []
    for code in sorted(sample.codes):
        try:
            s = by_code[code]
        except KeyError:
            raise ExtremesError(f"no daily series for sampled station {code}") from None
        for k in WINDOWS:
            out.append(annual_window_extreme(s, sample.year, k))
    return out


MAXIMA_HEADER = "station_code,year,k,max_mm,day_of_year"


def format_maxima(records: Iterable[AnnualExtreme]) -> str:
    buf = io.StringIO()
    buf.write(MAXIMA_HEADER + "\n")
    for r in records:
        buf.write(f"{r.station_code},{r.year},{r.window_days},{r.max_accum:.10g},{r.day_of_year}\n")
    return buf.getvalue()
