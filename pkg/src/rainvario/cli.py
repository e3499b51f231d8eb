"""Command-line entry point.

Exit codes: 0 success, 1 input error, 2 numerical or degenerate error.
"""
from __future__ import annotations

import argparse
import logging
import sys
import warnings
from pathlib import Path

from . import __version__
from .coherence import (
    CoherenceError, CoherenceRule, assign_phases, classify_year, crosstab_enso,
    format_classes, format_crosstab, format_summary, parse_percentages,
    summarize_percentages,
)
from .extremes import ExtremesError, extremes_matrix, format_maxima
from .ingest import (
    IngestError, filter_complete, parse_daily_series, parse_enso_table,
    parse_station_catalog, read_text,
)
from .modelfit import FitError, fit_linear, format_fits, parse_fits
from .pipeline import RunConfig, analyze
from .plot import PlotError, render_variogram_svg
from .simulate import FieldSpec, SimulationError, simulate_linear_field
from .variogram import (
    VariogramError, empirical_semivariogram, format_samples, format_variogram,
    parse_samples, parse_variogram,
)

log = logging.getLogger("rainvario")

INPUT_ERRORS = (IngestError, CoherenceError, ExtremesError, OSError, UnicodeDecodeError)
NUMERIC_ERRORS = (FitError, VariogramError, SimulationError, PlotError)


def parse_years(text: str) -> tuple[int, int]:
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            lo, hi = int(a), int(b)
        else:
            lo = hi = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected YEAR or A..B, got {text!r}") from None
    if hi < lo:
        raise argparse.ArgumentTypeError(f"empty year range {text!r}")
    return lo, hi


def parse_windows(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(k) for k in text.split(",") if k.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated windows, got {text!r}") from None


def _emit(args, name: str, text: str) -> None:
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / name, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _rule(args) -> CoherenceRule:
    return CoherenceRule(args.t_spatial, args.t_temporal, args.min_windows, args.windows)


# ------------------------------------------------------------- commands

def cmd_validate(args) -> int:
    n_err = 0
    for kind, path in (("stations", args.stations), ("daily", args.daily), ("enso", args.enso)):
        if path is None:
            continue
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            try:
                text = read_text(path)
                if kind == "stations":
                    items = parse_station_catalog(text)
                    msg = f"{len(items)} stations"
                elif kind == "daily":
                    items = parse_daily_series(text)
                    if not items:
                        raise IngestError("no series")
                    msg = f"{len(items)} series"
                else:
                    items = parse_enso_table(text)
                    msg = f"{len(items)} years"
                print(f"{path}: ok ({msg})")
            except (IngestError, OSError, UnicodeDecodeError) as exc:
                n_err += 1
                print(f"{path}: error: {exc}")
        for w in caught:
            print(f"{path}: warning: {w.message}")
    return 0 if n_err == 0 else 1


def cmd_maxima(args) -> int:
    stations = parse_station_catalog(read_text(args.stations)) if args.stations else None
    series = parse_daily_series(read_text(args.daily))
    if not series:
        raise IngestError("no series")
    records = []
    for year in range(args.years[0], args.years[1] + 1):
        sample = filter_complete(series, year, args.completeness, stations)
        records.extend(extremes_matrix(sample, series))
    _emit(args, "maxima.csv", format_maxima(records))
    return 0


def cmd_variogram(args) -> int:
    s = parse_samples(read_text(args.samples), label=Path(args.samples).stem)
    v = empirical_semivariogram(s, args.bin_width, args.max_lag)
    _emit(args, "variogram.csv", format_variogram(v))
    return 0


def cmd_fit(args) -> int:
    v = parse_variogram(read_text(args.variogram), args.bin_width, args.max_lag)
    fit = fit_linear(v, args.weighted, args.pct_mode)
    for w in fit.warnings:
        log.warning("%s: %s", args.variogram, w)
    _emit(args, "fits.csv", format_fits([(args.year, args.variable, args.k, fit)]))
    return 0


def cmd_classify(args) -> int:
    rows = parse_percentages(read_text(args.percentages))
    enso = parse_enso_table(read_text(args.enso))
    rule = _rule(args)
    classified = assign_phases([classify_year(r, rule) for r in rows], enso)
    _emit(args, "classes.csv", format_classes(classified))
    if args.out:
        _emit(args, "crosstab.csv", format_crosstab(crosstab_enso(classified, enso)))
        if len(rows) >= 2:
            _emit(args, "summary.csv", format_summary(summarize_percentages(rows)))
    return 0


def cmd_analyze(args) -> int:
    if not args.out:
        raise IngestError("analyze requires --out DIR")
    cfg = RunConfig(
        stations=args.stations, daily=args.daily, enso=args.enso, years=args.years,
        out=args.out, bin_width=args.bin_width, max_lag=args.max_lag,
        weighted=args.weighted, completeness=args.completeness, pct_mode=args.pct_mode,
        rule=_rule(args),
        jobs=args.jobs,
    )
    files = analyze(cfg)
    print(f"wrote {len(files)} files to {args.out}")
    return 0


def cmd_plot(args) -> int:
    v = parse_variogram(read_text(args.variogram), args.bin_width, args.max_lag)
    if len(v) == 0:
        raise PlotError("empty variogram")
    rows = parse_fits(read_text(args.fits))
    if not rows:
        raise PlotError("no fit rows")
    row = rows[args.row]
    title = args.title
    if title is None and row["variable"]:
        title = f"{row['variable']}_0{row['k']}/{row['year']}"
    svg = render_variogram_svg(v, row["fit"], args.max_lag, title)
    Path(args.svg).parent.mkdir(parents=True, exist_ok=True)
    with open(args.svg, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(svg)
    return 0


def cmd_simulate(args) -> int:
    spec = FieldSpec(args.n, tuple(args.domain), args.slope, args.nugget, args.seed)
    _emit(args, "samples.csv", format_samples(simulate_linear_field(spec)))
    return 0


# --------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rainvario", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def lag_flags(sp):
        sp.add_argument("--bin-width", type=float, default=0.25)
        sp.add_argument("--max-lag", type=float, default=5.0)

    def weight_flags(sp):
        g = sp.add_mutually_exclusive_group()
        g.add_argument("--weighted", dest="weighted", action="store_true", default=True,
                       help="weight bins by pair count (default)")
        g.add_argument("--unweighted", dest="weighted", action="store_false")
        sp.add_argument("--pct-mode", choices=("adjusted", "plain"), default="adjusted",
                        help="variance-explained convention (default: adjusted)")

    def rule_flags(sp):
        d = CoherenceRule()
        sp.add_argument("--t-spatial", type=float, default=d.t_spatial)
        sp.add_argument("--t-temporal", type=float, default=d.t_temporal)
        sp.add_argument("--min-windows", type=int, default=d.min_windows)
        sp.add_argument("--windows", type=parse_windows, default=d.window_set,
                        help="comma-separated window lengths, e.g. 2,3,4")

    def out_flag(sp):
        sp.add_argument("--out", metavar="DIR", help="output directory (default: stdout)")

    sp = sub.add_parser("validate", help="check input files")
    sp.add_argument("--stations")
    sp.add_argument("--daily")
    sp.add_argument("--enso")
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("maxima", help="annual k-day maxima and their start days")
    sp.add_argument("--daily", required=True)
    sp.add_argument("--stations")
    sp.add_argument("--years", type=parse_years, required=True, metavar="A..B")
    sp.add_argument("--completeness", type=float, default=1.0, metavar="F")
    out_flag(sp)
    sp.set_defaults(func=cmd_maxima)

    sp = sub.add_parser("variogram", help="empirical semivariogram of an x,y,z sample file")
    sp.add_argument("samples")
    lag_flags(sp)
    out_flag(sp)
    sp.set_defaults(func=cmd_variogram)

    sp = sub.add_parser("fit", help="linear model fit of a variogram.csv")
    sp.add_argument("variogram")
    lag_flags(sp)
    weight_flags(sp)
    sp.add_argument("--year", default="")
    sp.add_argument("--variable", default="")
    sp.add_argument("--k", default="")
    out_flag(sp)
    sp.set_defaults(func=cmd_fit)

    sp = sub.add_parser("classify", help="coherence categories from a percentages table")
    sp.add_argument("percentages")
    sp.add_argument("--enso", required=True)
    rule_flags(sp)
    out_flag(sp)
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("analyze", help="full pipeline")
    sp.add_argument("--stations", required=True)
    sp.add_argument("--daily", required=True)
    sp.add_argument("--enso", required=True)
    sp.add_argument("--years", type=parse_years, required=True, metavar="A..B")
    sp.add_argument("--completeness", type=float, default=1.0, metavar="F")
    sp.add_argument("--jobs", type=int, default=1)
    lag_flags(sp)
    weight_flags(sp)
    rule_flags(sp)
    out_flag(sp)
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("plot", help="SVG of a variogram and its linear fit")
    sp.add_argument("variogram")
    sp.add_argument("fits")
    sp.add_argument("svg")
    sp.add_argument("--row", type=int, default=0, help="row of fits.csv to draw")
    sp.add_argument("--title")
    lag_flags(sp)
    sp.set_defaults(func=cmd_plot)

    sp = sub.add_parser("simulate", help="synthetic linear-variogram field as x,y,z")
    sp.add_argument("--n", type=int, default=400)
    sp.add_argument("--slope", type=float, default=100.0)
    sp.add_argument("--nugget", type=float, default=0.0)
    sp.add_argument("--domain", type=float, nargs=4, default=(0.0, 5.0, 0.0, 5.0),
                    metavar=("XMIN", "XMAX", "YMIN", "YMAX"))
    sp.add_argument("--seed", type=int, default=0)
    out_flag(sp)
    sp.set_defaults(func=cmd_simulate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except NUMERIC_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (*INPUT_ERRORS, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
