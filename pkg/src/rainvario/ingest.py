"""Readers for station catalogs, daily precipitation series and ENSO tables.

All readers take CSV *text* (not paths) so they can be used on in-memory
fixtures; see :func:`read_text` for file access with CRLF tolerance.
"""
from __future__ import annotations

import calendar
import csv
import datetime as dt
import enum
import io
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

# lat_min, lat_max, lon_min, lon_max
DEFAULT_BBOX = (-34.5, -26.5, -58.5, -49.0)


class IngestError(ValueError):
    """Raised on malformed or inconsistent input data."""


class CoordinateWarning(UserWarning):
    """A station lies outside the regional bounding box."""


def read_text(path: str | Path) -> str:
    with open(path, encoding="utf-8", newline="") as fh:
        return fh.read().replace("\r\n", "\n")


def _rows(text: str, header: Sequence[str]):
    text = text.replace("\r\n", "\n")
    reader = csv.reader(io.StringIO(text))
    try:
        first = next(reader)
    except StopIteration:
        raise IngestError(f"empty input, expected header {','.join(header)!r}")
    if [c.strip().lstrip("﻿") for c in first] != list(header):
        raise IngestError(
            f"line 1: expected header {','.join(header)!r}, got {','.join(first)!r}"
        )
    for row in reader:
        if not row or all(not c.strip() for c in row):
            continue
        yield reader.line_num, row


# ---------------------------------------------------------------- stations

@dataclass(frozen=True)
class Station:
    code: int
    name: str
    lat: float
    lon: float
    network: str = ""
    # original coordinate text, kept so a catalog re-serializes verbatim
    raw_coords: tuple[str, str] | None = field(default=None, compare=False, repr=False)


STATION_HEADER = ("code", "name", "lat", "lon", "network")


def parse_station_catalog(
    text: str, bbox: tuple[float, float, float, float] | None = DEFAULT_BBOX
) -> list[Station]:
    """Parse a ``code,name,lat,lon,network`` catalog.

    Coordinates outside the regional ``bbox`` emit a :class:`CoordinateWarning`
    and are kept unchanged. Pass ``bbox=None`` to skip the regional check.
    """
    stations: list[Station] = []
    seen: set[int] = set()
    for line, row in _rows(text, STATION_HEADER):
        if len(row) != 5:
            raise IngestError(f"line {line}: expected 5 fields, got {len(row)}")
        code_s, name, lat_s, lon_s, network = row
        try:
            code = int(code_s)
            lat = float(lat_s)
            lon = float(lon_s)
        except ValueError as exc:
            raise IngestError(f"line {line}: {exc}") from None
        if not (np.isfinite(lat) and np.isfinite(lon)):
            raise IngestError(f"line {line}: non-finite coordinate")
        if not -90.0 <= lat <= 90.0:
            raise IngestError(f"line {line}: latitude {lat} outside [-90, 90]")
        if not -180.0 <= lon <= 180.0:
            raise IngestError(f"line {line}: longitude {lon} outside [-180, 180]")
        if code in seen:
            raise IngestError(f"line {line}: duplicate station code {code}")
        seen.add(code)
        st = Station(code, name, lat, lon, network, raw_coords=(lat_s, lon_s))
        if bbox is not None:
            _check_bbox(st, bbox, line)
        stations.append(st)
    return stations


def _check_bbox(st: Station, bbox, line: int) -> None:
    lat_min, lat_max, lon_min, lon_max = bbox
    problems = []
    if not lat_min <= st.lat <= lat_max:
        problems.append(f"lat {st.lat} outside [{lat_min}, {lat_max}]")
    if not lon_min <= st.lon <= lon_max:
        problems.append(f"lon {st.lon} outside [{lon_min}, {lon_max}]")
    if problems:
        warnings.warn(
            f"line {line}: station {st.code} ({st.name}): " + "; ".join(problems),
            CoordinateWarning,
            stacklevel=3,
        )


def format_station_catalog(stations: Iterable[Station]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(STATION_HEADER)
    for st in stations:
        lat_s, lon_s = st.raw_coords or (repr(st.lat), repr(st.lon))
        writer.writerow([st.code, st.name, lat_s, lon_s, st.network])
    return buf.getvalue()


# ------------------------------------------------------------ daily series

@dataclass(frozen=True, eq=False)
class DailySeries:
    """Contiguous daily precipitation (mm); ``nan`` marks a missing day."""

    station_code: int
    start_date: dt.date
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if np.any(vals[~np.isnan(vals)] < 0):
            raise IngestError(f"station {self.station_code}: negative precipitation")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return len(self.values)

    @property
    def end_date(self) -> dt.date:
        return self.start_date + dt.timedelta(days=len(self.values) - 1)

    def year_values(self, year: int) -> np.ndarray:
        """Values for every day of ``year``; days outside the span are ``nan``."""
        n = days_in_year(year)
        out = np.full(n, np.nan)
        jan1 = dt.date(year, 1, 1)
        offset = (self.start_date - jan1).days
        lo = max(offset, 0)
        hi = min(offset + len(self.values), n)
        if lo < hi:
            out[lo:hi] = self.values[lo - offset:hi - offset]
        return out

    def covers_any(self, year: int) -> bool:
        return self.start_date.year <= year <= self.end_date.year


def days_in_year(year: int) -> int:
    return 366 if calendar.isleap(year) else 365


DAILY_HEADER = ("station_code", "date", "precip_mm")


def parse_daily_series(text: str) -> list[DailySeries]:
    """Parse long-format daily rows into one gap-filled series per station.

    Series are returned sorted by station code.
    """
    by_station: dict[int, dict[dt.date, float]] = {}
    for line, row in _rows(text, DAILY_HEADER):
        if len(row) != 3:
            raise IngestError(f"line {line}: expected 3 fields, got {len(row)}")
        code_s, date_s, val_s = (c.strip() for c in row)
        try:
            code = int(code_s)
        except ValueError:
            raise IngestError(f"line {line}: bad station code {code_s!r}") from None
        try:
            day = dt.date.fromisoformat(date_s)
        except ValueError:
            raise IngestError(f"line {line}: unparseable date {date_s!r}") from None
        if val_s == "":
            val = np.nan
        else:
            try:
                val = float(val_s)
            except ValueError:
                raise IngestError(f"line {line}: bad precipitation {val_s!r}") from None
            if not np.isfinite(val):
                raise IngestError(f"line {line}: non-finite precipitation {val_s!r}")
            if val < 0:
                raise IngestError(f"line {line}: negative precipitation {val}")
        days = by_station.setdefault(code, {})
        if day in days:
            raise IngestError(f"line {line}: duplicate date {day} for station {code}")
        days[day] = val

    out = []
    for code in sorted(by_station):
        days = by_station[code]
        start, end = min(days), max(days)
        values = np.full((end - start).days + 1, np.nan)
        for day, val in days.items():
            values[(day - start).days] = val
        out.append(DailySeries(code, start, values))
    return out


def format_daily_series(series: Iterable[DailySeries]) -> str:
    buf = io.StringIO()
    buf.write(",".join(DAILY_HEADER) + "\n")
    for s in series:
        for i, v in enumerate(s.values):
            day = s.start_date + dt.timedelta(days=i)
            buf.write(f"{s.station_code},{day.isoformat()},{'' if np.isnan(v) else repr(float(v))}\n")
    return buf.getvalue()


# ------------------------------------------------------------ completeness

@dataclass(frozen=True)
class SampleEntry:
    station_code: int
    lat: float
    lon: float
    present_days: int
    total_days: int


@dataclass(frozen=True)
class StationYearSample:
    year: int
    entries: tuple[SampleEntry, ...]

    @property
    def codes(self) -> list[int]:
        return [e.station_code for e in self.entries]

    def __len__(self) -> int:
        return len(self.entries)


def filter_complete(
    series: Sequence[DailySeries],
    year: int,
    min_fraction: float = 1.0,
    stations: Mapping[int, Station] | Sequence[Station] | None = None,
) -> StationYearSample:
    """Keep stations whose fraction of observed days in ``year`` is at least
    ``min_fraction``. A station needs at least one observation to qualify.

    Coordinates are looked up in ``stations``; when that is ``None`` they are
    left as ``nan``. A series whose station is missing from a given catalog
    raises :class:`IngestError`.
    """
    if not 0.0 <= min_fraction <= 1.0:
        raise ValueError(f"min_fraction must lie in [0, 1], got {min_fraction}")
    if stations is not None and not isinstance(stations, Mapping):
        stations = {s.code: s for s in stations}
    total = days_in_year(year)
    entries = []
    for s in sorted(series, key=lambda s: s.station_code):
        if not s.covers_any(year):
            continue
        present = int(np.count_nonzero(~np.isnan(s.year_values(year))))
        if present == 0 or present / total < min_fraction:
            continue
        if stations is None:
            lat = lon = float("nan")
        else:
            try:
                st = stations[s.station_code]
            except KeyError:
                raise IngestError(f"station {s.station_code} not in catalog") from None
            lat, lon = st.lat, st.lon
        entries.append(SampleEntry(s.station_code, lat, lon, present, total))
    return StationYearSample(year, tuple(entries))


# -------------------------------------------------------------------- ENSO

class EnsoPhase(enum.Enum):
    EL_NINO = "el_nino"
    LA_NINA = "la_nina"
    NO_SIGN = "no_sign"

    @property
    def label(self) -> str:
        return {"el_nino": "ElNino", "la_nina": "LaNina", "no_sign": "NoSign"}[self.value]


def parse_enso_table(text: str) -> dict[int, EnsoPhase]:
    table: dict[int, EnsoPhase] = {}
    for line, row in _rows(text, ("year", "phase")):
        if len(row) != 2:
            raise IngestError(f"line {line}: expected 2 fields, got {len(row)}")
        try:
            year = int(row[0])
        except ValueError:
            raise IngestError(f"line {line}: bad year {row[0]!r}") from None
        try:
            phase = EnsoPhase(row[1].strip())
        except ValueError:
            raise IngestError(f"line {line}: unknown ENSO phase {row[1]!r}") from None
        if year in table:
            raise IngestError(f"line {line}: duplicate year {year}")
        table[year] = phase
    return table
