"""Empirical isotropic semivariogram and covariogram of scattered samples.

Pairs are enumerated once each, in ``(i, j)`` order with ``i < j``, and every
per-bin sum is accumulated in that order so results do not depend on how the
work is scheduled.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

EARTH_RADIUS_KM = 6371.0088


class VariogramError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class SampleSet:
    """Values ``z`` observed at planar coordinates ``(x, y)`` (lon, lat degrees)."""

    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    label: str = ""

    def __post_init__(self):
        arrs = [np.array(a, dtype=float) for a in (self.x, self.y, self.z)]
        if not (arrs[0].shape == arrs[1].shape == arrs[2].shape) or arrs[0].ndim != 1:
            raise VariogramError("x, y and z must be 1-d arrays of equal length")
        for name, a in zip("xyz", arrs):
            a.setflags(write=False)
            object.__setattr__(self, name, a)

    @classmethod
    def from_points(cls, points: Iterable[Sequence[float]], label: str = "") -> "SampleSet":
        pts = np.asarray(list(points), dtype=float).reshape(-1, 3)
        return cls(pts[:, 0], pts[:, 1], pts[:, 2], label)

    def __len__(self) -> int:
        return len(self.z)

    @property
    def mean(self) -> float:
        return float(np.mean(self.z))

    @property
    def variance(self) -> float:
        """Population variance (denominator n)."""
        return float(np.var(self.z))


def pairwise_distance(p, q, metric: str = "planar") -> float:
    """Distance between ``(x, y)`` points.

    ``planar`` is Euclidean distance in the raw degree plane. ``greatcircle``
    treats ``x`` as longitude and ``y`` as latitude and returns kilometres.
    """
    if metric == "planar":
        return math.hypot(q[0] - p[0], q[1] - p[1])
    if metric == "greatcircle":
        lon1, lat1, lon2, lat2 = map(math.radians, (p[0], p[1], q[0], q[1]))
        a = (math.sin((lat2 - lat1) / 2) ** 2
             + math.cos(lat1) * math.cos(lat2) * math.sin((lon2 - lon1) / 2) ** 2)
        return 2 * EARTH_RADIUS_KM * math.asin(min(1.0, math.sqrt(a)))
    raise ValueError(f"unknown metric {metric!r}")


def _pairs(s: SampleSet, metric: str):
    """Upper-triangle pair indices and their distances, row-major."""
    i, j = np.triu_indices(len(s), k=1)
    if metric == "planar":
        d = np.hypot(s.x[j] - s.x[i], s.y[j] - s.y[i])
    elif metric == "greatcircle":
        lon1, lat1, lon2, lat2 = (np.radians(a) for a in (s.x[i], s.y[i], s.x[j], s.y[j]))
        a = (np.sin((lat2 - lat1) / 2) ** 2
             + np.cos(lat1) * np.cos(lat2) * np.sin((lon2 - lon1) / 2) ** 2)
        d = 2 * EARTH_RADIUS_KM * np.arcsin(np.minimum(1.0, np.sqrt(a)))
    else:
        raise ValueError(f"unknown metric {metric!r}")
    return i, j, d


def _binned_pairs(s: SampleSet, bin_width: float, max_lag: float, metric: str):
    if not bin_width > 0:
        raise VariogramError(f"bin width must be positive, got {bin_width}")
    if not max_lag > 0:
        raise VariogramError(f"max_lag must be positive, got {max_lag}")
    if len(s) < 2:
        raise VariogramError(f"need at least 2 points, got {len(s)}")
    i, j, d = _pairs(s, metric)
    keep = (d > 0) & (d <= max_lag)
    if not keep.any():
        raise VariogramError("no pairs in range")
    i, j, d = i[keep], j[keep], d[keep]
    # interval (index*w, (index+1)*w]
    idx = np.ceil(d / bin_width).astype(np.int64) - 1
    return i, j, d, idx


@dataclass(frozen=True)
class LagBin:
    index: int
    n: int
    h: float
    v: float


@dataclass(frozen=True)
class EmpiricalVariogram:
    bin_width: float
    max_lag: float
    bins: tuple[LagBin, ...]
    source_label: str = ""

    def __post_init__(self):
        bins = tuple(sorted(self.bins, key=lambda b: b.index))
        if any(a.index == b.index for a, b in zip(bins, bins[1:])):
            raise VariogramError("duplicate bin index")
        if any(b.n < 1 for b in bins):
            raise VariogramError("every retained bin needs N >= 1")
        object.__setattr__(self, "bins", bins)

    def __len__(self) -> int:
        return len(self.bins)

    @property
    def n(self) -> np.ndarray:
        return np.array([b.n for b in self.bins], dtype=float)

    @property
    def h(self) -> np.ndarray:
        return np.array([b.h for b in self.bins], dtype=float)

    @property
    def v(self) -> np.ndarray:
        return np.array([b.v for b in self.bins], dtype=float)


def empirical_semivariogram(
    s: SampleSet,
    bin_width: float = 0.25,
    max_lag: float = 5.0,
    metric: str = "planar",
) -> EmpiricalVariogram:
    """Classical (Matheron) estimator: per bin, ``V = sum((zi - zj)**2) / (2N)``.

    ``h`` is reported as the mean pair distance in the bin, not the bin
    centre. Co-located pairs and pairs beyond ``max_lag`` are dropped and
    empty bins are omitted.
    """
    i, j, d, idx = _binned_pairs(s, bin_width, max_lag, metric)
    sq = (s.z[i] - s.z[j]) ** 2
    nbins = int(idx.max()) + 1
    counts = np.bincount(idx, minlength=nbins)
    dsum = np.bincount(idx, weights=d, minlength=nbins)
    sqsum = np.bincount(idx, weights=sq, minlength=nbins)
    bins = tuple(
        LagBin(int(k), int(counts[k]), float(dsum[k] / counts[k]), float(sqsum[k] / (2 * counts[k])))
        for k in np.flatnonzero(counts)
    )
    return EmpiricalVariogram(float(bin_width), float(max_lag), bins, s.label)


@dataclass(frozen=True)
class CovarianceBin:
    index: int
    n: int
    h: float
    c: float


@dataclass(frozen=True)
class EmpiricalCovariogram:
    bin_width: float
    max_lag: float
    bins: tuple[CovarianceBin, ...]
    c0: float
    mean: float

    @property
    def h(self) -> np.ndarray:
        return np.array([b.h for b in self.bins])

    @property
    def c(self) -> np.ndarray:
        return np.array([b.c for b in self.bins])


def empirical_covariogram(
    s: SampleSet,
    bin_width: float = 0.25,
    max_lag: float = 5.0,
    metric: str = "planar",
) -> EmpiricalCovariogram:
    """Binned ``C(h) = mean((zi - mu)(zj - mu))`` with ``mu`` the sample mean,
    and ``C(0)`` the sample variance with denominator n."""
    i, j, d, idx = _binned_pairs(s, bin_width, max_lag, metric)
    mu = s.mean
    r = s.z - mu
    prod = r[i] * r[j]
    nbins = int(idx.max()) + 1
    counts = np.bincount(idx, minlength=nbins)
    dsum = np.bincount(idx, weights=d, minlength=nbins)
    psum = np.bincount(idx, weights=prod, minlength=nbins)
    bins = tuple(
        CovarianceBin(int(k), int(counts[k]), float(dsum[k] / counts[k]), float(psum[k] / counts[k]))
        for k in np.flatnonzero(counts)
    )
    c0 = float(np.mean(r * r))
    return EmpiricalCovariogram(float(bin_width), float(max_lag), bins, c0, mu)


# ---------------------------------------------------------------- CSV I/O

VARIOGRAM_HEADER = ("bin_index", "N", "h", "V")


def format_variogram(v: EmpiricalVariogram) -> str:
    buf = io.StringIO()
    buf.write(",".join(VARIOGRAM_HEADER) + "\n")
    for b in v.bins:
        buf.write(f"{b.index},{b.n},{b.h:.10g},{b.v:.10g}\n")
    return buf.getvalue()


def parse_variogram(
    text: str, bin_width: float = 0.25, max_lag: float = 5.0, label: str = ""
) -> EmpiricalVariogram:
    reader = csv.reader(io.StringIO(text.replace("\r\n", "\n")))
    header = next(reader, None)
    if header is None or tuple(c.strip() for c in header) != VARIOGRAM_HEADER:
        raise VariogramError(f"expected header {','.join(VARIOGRAM_HEADER)!r}")
    bins = []
    for row in reader:
        if not row:
            continue
        try:
            bins.append(LagBin(int(row[0]), int(row[1]), float(row[2]), float(row[3])))
        except (ValueError, IndexError):
            raise VariogramError(f"line {reader.line_num}: malformed bin row") from None
    return EmpiricalVariogram(bin_width, max_lag, tuple(bins), label)


SAMPLE_HEADER = ("x", "y", "z")


def format_samples(s: SampleSet) -> str:
    buf = io.StringIO()
    buf.write("x,y,z\n")
    for x, y, z in zip(s.x, s.y, s.z):
        buf.write(f"{float(x)!r},{float(y)!r},{float(z)!r}\n")
    return buf.getvalue()


def parse_samples(text: str, label: str = "") -> SampleSet:
    reader = csv.reader(io.StringIO(text.replace("\r\n", "\n")))
    header = next(reader, None)
    if header is None or tuple(c.strip() for c in header) != SAMPLE_HEADER:
        raise VariogramError("expected header 'x,y,z'")
    pts = []
    for row in reader:
        if not row:
            continue
        try:
            pts.append([float(c) for c in row])
        except ValueError:
            raise VariogramError(f"line {reader.line_num}: malformed sample row") from None
        if len(pts[-1]) != 3:
            raise VariogramError(f"line {reader.line_num}: expected 3 fields")
    return SampleSet.from_points(pts, label)
