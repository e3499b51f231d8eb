"""Per-year coherence categories from fit percentages, and ENSO cross-tabulation.

Category codes: 1 neither axis coherent, 2 temporal only, 3 spatial only,
4 both. Spatial coherence is read from the MaxI variograms, temporal
coherence from the DiaM variograms.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .ingest import EnsoPhase

PHASE_ORDER = (EnsoPhase.EL_NINO, EnsoPhase.LA_NINA, EnsoPhase.NO_SIGN)
PCT_COLUMNS = tuple(f"MaxI_0{k}" for k in range(1, 6)) + tuple(f"DiaM_0{k}" for k in range(1, 6))


class CoherenceError(ValueError):
    pass


@dataclass(frozen=True)
class YearPercentages:
    year: int
    n_obs: int
    maxi_pct: tuple[float, ...]
    diam_pct: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "maxi_pct", tuple(float(p) for p in self.maxi_pct))
        object.__setattr__(self, "diam_pct", tuple(float(p) for p in self.diam_pct))
        if len(self.maxi_pct) != 5 or len(self.diam_pct) != 5:
            raise CoherenceError(f"{self.year}: need five MaxI and five DiaM percentages")
        if any(not 0 <= p <= 100 for p in self.maxi_pct + self.diam_pct):
            raise CoherenceError(f"{self.year}: percentages must lie in [0, 100]")
        if self.n_obs < 2:
            raise CoherenceError(f"{self.year}: n_obs must be at least 2")


@dataclass(frozen=True)
class CoherenceRule:
    """A year is coherent on an axis when at least ``min_windows`` of the
    windows in ``window_set`` reach the axis threshold.

    The defaults were recovered by an integer grid search as the rule of this
    family that reproduces the published year categories from the published
    percentages. They are an inference, not a documented procedure.
    """

    t_spatial: float = 47.0
    t_temporal: float = 44.0
    min_windows: int = 2
    window_set: tuple[int, ...] = (1, 2, 3, 4, 5)

    def __post_init__(self):
        ws = tuple(sorted(set(int(k) for k in self.window_set)))
        if not ws or any(k not in range(1, 6) for k in ws):
            raise CoherenceError(f"window_set must be a non-empty subset of 1..5, got {self.window_set}")
        if not 1 <= self.min_windows <= len(ws):
            raise CoherenceError(f"min_windows must lie in [1, {len(ws)}], got {self.min_windows}")
        object.__setattr__(self, "window_set", ws)


@dataclass(frozen=True)
class YearCoherence:
    year: int
    spatial: bool
    temporal: bool
    phase: EnsoPhase | None = None

    @property
    def category(self) -> int:
        return 1 + int(self.temporal) + 2 * int(self.spatial)


def _hits(pcts: Sequence[float], threshold: float, rule: CoherenceRule) -> bool:
    return sum(pcts[k - 1] >= threshold for k in rule.window_set) >= rule.min_windows


def classify_year(p: YearPercentages, rule: CoherenceRule = CoherenceRule()) -> YearCoherence:
    return YearCoherence(
        p.year,
        spatial=_hits(p.maxi_pct, rule.t_spatial, rule),
        temporal=_hits(p.diam_pct, rule.t_temporal, rule),
    )


def assign_phases(classified: Sequence[YearCoherence], enso: Mapping[int, EnsoPhase]) -> list[YearCoherence]:
    out = []
    for c in classified:
        if c.year not in enso:
            raise CoherenceError(f"year {c.year} missing from ENSO table")
        out.append(YearCoherence(c.year, c.spatial, c.temporal, enso[c.year]))
    return out


@dataclass(frozen=True)
class PercentSummary:
    columns: tuple[str, ...]
    mean: np.ndarray
    sd: np.ndarray

    def rounded(self) -> tuple[list[int], list[int]]:
        # half-up, matching the integer rows printed in tables
        return (
            [int(np.floor(m + 0.5)) for m in self.mean],
            [int(np.floor(s + 0.5)) for s in self.sd],
        )


def summarize_percentages(rows: Sequence[YearPercentages]) -> PercentSummary:
    """Column mean and sample standard deviation (n - 1) over years,
    covering ``n_obs`` plus the ten percentage columns."""
    if len(rows) < 2:
        raise CoherenceError(f"need at least 2 rows to summarize, got {len(rows)}")
    a = np.array([[r.n_obs, *r.maxi_pct, *r.diam_pct] for r in rows], dtype=float)
    return PercentSummary(("n_obs",) + PCT_COLUMNS, a.mean(axis=0), a.std(axis=0, ddof=1))


@dataclass(frozen=True)
class CrossTab:
    counts: dict = field(default_factory=dict)  # EnsoPhase -> [cat1..cat4]

    def row(self, phase: EnsoPhase) -> list[int]:
        return list(self.counts[phase])

    @property
    def category_totals(self) -> list[int]:
        return [sum(self.counts[p][c] for p in PHASE_ORDER) for c in range(4)]

    @property
    def total(self) -> int:
        return sum(self.category_totals)


def crosstab_enso(classified: Sequence[YearCoherence], enso: Mapping[int, EnsoPhase]) -> CrossTab:
    counts = {p: [0, 0, 0, 0] for p in PHASE_ORDER}
    for c in classified:
        if c.year not in enso:
            raise CoherenceError(f"year {c.year} missing from ENSO table")
        counts[enso[c.year]][c.category - 1] += 1
    return CrossTab(counts)


# ---------------------------------------------------------------- CSV I/O

PCT_HEADER = ("year", "n_obs") + PCT_COLUMNS


def parse_percentages(text: str) -> list[YearPercentages]:
    reader = csv.reader(io.StringIO(text.replace("\r\n", "\n")))
    header = next(reader, None)
    if header is None or tuple(c.strip() for c in header) != PCT_HEADER:
        raise CoherenceError(f"expected header {','.join(PCT_HEADER)!r}")
    rows = []
    for row in reader:
        if not row:
            continue
        if len(row) != len(PCT_HEADER):
            raise CoherenceError(f"line {reader.line_num}: expected {len(PCT_HEADER)} fields")
        try:
            vals = [float(c) for c in row[2:]]
            rows.append(YearPercentages(int(row[0]), int(row[1]), tuple(vals[:5]), tuple(vals[5:])))
        except ValueError as exc:
            raise CoherenceError(f"line {reader.line_num}: {exc}") from None
    return rows


def format_percentages(rows: Sequence[YearPercentages]) -> str:
    buf = io.StringIO()
    buf.write(",".join(PCT_HEADER) + "\n")
    for r in rows:
        buf.write(",".join([str(r.year), str(r.n_obs)] + [f"{p:.10g}" for p in r.maxi_pct + r.diam_pct]) + "\n")
    return buf.getvalue()


def format_classes(classified: Sequence[YearCoherence]) -> str:
    buf = io.StringIO()
    buf.write("year,spatial,temporal,category,phase\n")
    for c in classified:
        phase = c.phase.value if c.phase is not None else ""
        buf.write(f"{c.year},{str(c.spatial).lower()},{str(c.temporal).lower()},{c.category},{phase}\n")
    return buf.getvalue()


def format_crosstab(tab: CrossTab) -> str:
    buf = io.StringIO()
    buf.write("phase,cat1,cat2,cat3,cat4,total\n")
    for p in PHASE_ORDER:
        row = tab.counts[p]
        buf.write(f"{p.value},{','.join(map(str, row))},{sum(row)}\n")
    tot = tab.category_totals
    buf.write(f"total,{','.join(map(str, tot))},{sum(tot)}\n")
    return buf.getvalue()


def format_summary(summary: PercentSummary) -> str:
    buf = io.StringIO()
    buf.write("statistic," + ",".join(summary.columns) + "\n")
    buf.write("mean," + ",".join(f"{m:.10g}" for m in summary.mean) + "\n")
    buf.write("sd," + ",".join(f"{s:.10g}" for s in summary.sd) + "\n")
    return buf.getvalue()
