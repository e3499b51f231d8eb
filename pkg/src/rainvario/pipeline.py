"""End-to-end analysis: daily series -> annual maxima -> variograms -> fits -> classes."""
from __future__ import annotations

import dataclasses
import hashlib
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .coherence import (
    CoherenceRule, YearPercentages, assign_phases, classify_year, crosstab_enso,
    format_classes, format_crosstab, format_percentages, format_summary,
    summarize_percentages,
)
from .extremes import DAY_CONVENTION, WINDOWS, extremes_matrix, format_maxima
from .ingest import (
    IngestError, filter_complete, parse_daily_series, parse_enso_table,
    parse_station_catalog, read_text,
)
from .modelfit import PCT_MODES, FitError, fit_linear, format_fits
from .variogram import SampleSet, empirical_semivariogram, format_variogram

log = logging.getLogger(__name__)

VARIABLES = ("MaxI", "DiaM")
PARTIAL_MARKER = "_PARTIAL"


@dataclass
class RunConfig:
    stations: str
    daily: str
    enso: str
    years: tuple[int, int]
    out: str
    bin_width: float = 0.25
    max_lag: float = 5.0
    weighted: bool = True
    completeness: float = 1.0
    pct_mode: str = "adjusted"
    rule: CoherenceRule = field(default_factory=CoherenceRule)
    jobs: int = 1

    def as_dict(self) -> dict:
        """Analysis settings; ``jobs`` is left out because it never changes output."""
        d = dataclasses.asdict(self)
        del d["jobs"]
        d["years"] = list(self.years)
        d["rule"]["window_set"] = list(self.rule.window_set)
        return d


def sha256_file(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _cell(year, variable, k, sample, by_station, cfg):
    pts = []
    for e in sample.entries:
        rec = by_station[(e.station_code, k)]
        z = rec.max_accum if variable == "MaxI" else float(rec.day_of_year)
        pts.append((e.lon, e.lat, z))
    s = SampleSet.from_points(pts, f"{variable}_0{k}/{year}")
    v = empirical_semivariogram(s, cfg.bin_width, cfg.max_lag)
    return v, fit_linear(v, cfg.weighted, cfg.pct_mode)


def analyze(cfg: RunConfig) -> dict[str, str]:
    """Run the whole chain and write the report bundle into ``cfg.out``.

    Returns a mapping of relative output path to file content. On any error
    a ``_PARTIAL`` marker describing it is left in the output directory and
    the exception propagates.
    """
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    marker = out / PARTIAL_MARKER
    if marker.exists():
        marker.unlink()
    try:
        files = _analyze(cfg)
        for rel, text in files.items():
            p = out / rel
            p.parent.mkdir(parents=True, exist_ok=True)
            with open(p, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
    except Exception as exc:
        marker.write_text(f"{type(exc).__name__}: {exc}\n", encoding="utf-8")
        raise
    return files


def _analyze(cfg: RunConfig) -> dict[str, str]:
    stations = parse_station_catalog(read_text(cfg.stations))
    series = parse_daily_series(read_text(cfg.daily))
    enso = parse_enso_table(read_text(cfg.enso))
    if not series:
        raise IngestError("no series")
    y0, y1 = cfg.years
    if y1 < y0:
        raise ValueError(f"empty year range {y0}..{y1}")

    files: dict[str, str] = {}
    maxima = []
    jobs = []
    samples = {}
    for year in range(y0, y1 + 1):
        sample = filter_complete(series, year, cfg.completeness, stations)
        if len(sample) < 2:
            raise FitError(f"{year}: only {len(sample)} station(s) pass the completeness filter")
        log.info("%d: %d stations", year, len(sample))
        samples[year] = sample
        recs = extremes_matrix(sample, series)
        maxima.extend(recs)
        by_station = {(r.station_code, r.window_days): r for r in recs}
        for variable in VARIABLES:
            for k in WINDOWS:
                jobs.append((year, variable, k, sample, by_station))

    files["maxima.csv"] = format_maxima(maxima)

    def run(job):
        return _cell(*job, cfg)

    if cfg.jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(j) for j in jobs]

    fit_rows = []
    pcts: dict[tuple[int, str], list[float]] = {}
    for (year, variable, k, _, _), (v, fit) in zip(jobs, results):
        files[f"variograms/{year}_{variable}_0{k}.csv"] = format_variogram(v)
        fit_rows.append((year, variable, k, fit))
        pcts.setdefault((year, variable), []).append(fit.pct_explained)
    files["fits.csv"] = format_fits(fit_rows)

    rows = [
        YearPercentages(year, len(samples[year]), pcts[(year, "MaxI")], pcts[(year, "DiaM")])
        for year in range(y0, y1 + 1)
    ]
    files["percentages.csv"] = format_percentages(rows)
    classified = assign_phases([classify_year(r, cfg.rule) for r in rows], enso)
    files["classes.csv"] = format_classes(classified)
    files["crosstab.csv"] = format_crosstab(crosstab_enso(classified, enso))
    if len(rows) >= 2:
        files["summary.csv"] = format_summary(summarize_percentages(rows))
    else:
        files["summary.csv"] = "statistic\n"

    manifest = {
        "tool": "rainvario",
        "version": __version__,
        "config": cfg.as_dict(),
        "inputs": {
            "stations": sha256_file(cfg.stations),
            "daily": sha256_file(cfg.daily),
            "enso": sha256_file(cfg.enso),
        },
        "conventions": {
            "distance": "planar degrees (lon, lat)",
            "lag": "mean pair distance per bin, bins (i*w, (i+1)*w]",
            "day_of_year": DAY_CONVENTION,
            "pct_explained": PCT_MODES[cfg.pct_mode],
            "fit_weights": "pair counts" if cfg.weighted else "unit",
            "rule_defaults": "grid-search calibration against published categories",
        },
        "outputs": sorted(files),
    }
    files["manifest.json"] = json.dumps(manifest, indent=2, sort_keys=True) + "\n"
    return files
