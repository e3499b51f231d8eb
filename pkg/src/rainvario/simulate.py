"""Synthetic Gaussian fields with a known variogram.

Used as ground truth for the estimator and the fitter. Random numbers come
from numpy's PCG64 bit generator, which is portable across platforms for a
given seed.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .variogram import SampleSet

GENERATOR = "numpy.random.PCG64"
JITTER = 1e-10


class SimulationError(ValueError):
    pass


@dataclass(frozen=True)
class FieldSpec:
    n_points: int
    domain: tuple[float, float, float, float] = (0.0, 5.0, 0.0, 5.0)  # xmin, xmax, ymin, ymax
    slope: float = 100.0
    nugget: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.n_points < 3:
            raise SimulationError(f"n_points must be at least 3, got {self.n_points}")
        xmin, xmax, ymin, ymax = self.domain
        if not (xmax > xmin and ymax > ymin):
            raise SimulationError(f"empty domain {self.domain}")
        if self.slope < 0 or self.nugget < 0:
            raise SimulationError("slope and nugget must be non-negative")

    @property
    def origin(self) -> tuple[float, float]:
        return self.domain[0], self.domain[2]


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _uniform_points(rng: np.random.Generator, n: int, domain) -> tuple[np.ndarray, np.ndarray]:
    xmin, xmax, ymin, ymax = domain
    x = rng.uniform(xmin, xmax, n)
    y = rng.uniform(ymin, ymax, n)
    return x, y


def _distances(x, y) -> np.ndarray:
    return np.hypot(x[:, None] - x[None, :], y[:, None] - y[None, :])


def intrinsic_covariance(x, y, origin, slope: float, nugget: float = 0.0) -> np.ndarray:
    """Covariance of a linear-variogram field pinned to zero at ``origin``.

    ``K[p, q] = g(|p - o|) + g(|q - o|) - g(|p - q|)`` with ``g(h) = slope*h``;
    the nugget enters as independent noise on the diagonal, so that
    ``Var(Z(p) - Z(q)) = 2*(nugget + slope*|p - q|)`` for distinct points.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    r = np.hypot(x - origin[0], y - origin[1])
    K = slope * (r[:, None] + r[None, :] - _distances(x, y))
    K[np.diag_indices_from(K)] += nugget
    return K


def _gaussian(K: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    n = len(K)
    try:
        L = np.linalg.cholesky(K + JITTER * np.eye(n))
    except np.linalg.LinAlgError:
        raise SimulationError("covariance is not positive definite") from None
    return L @ rng.standard_normal(n)


def simulate_linear_field(spec: FieldSpec) -> SampleSet:
    """Zero-mean Gaussian intrinsic field with ``gamma(h) = nugget + slope*h``.

    Points are uniform on ``spec.domain``; the field is pinned at the lower
    left corner. Identical specs give identical output.
    """
    rng = _rng(spec.seed)
    x, y = _uniform_points(rng, spec.n_points, spec.domain)
    label = f"linear b={spec.slope:g} c0={spec.nugget:g} seed={spec.seed}"
    if spec.slope == 0 and spec.nugget == 0:
        return SampleSet(x, y, np.zeros(spec.n_points), label)
    K = intrinsic_covariance(x, y, spec.origin, spec.slope, 0.0)
    z = _gaussian(K, rng)
    if spec.nugget > 0:
        z = z + np.sqrt(spec.nugget) * rng.standard_normal(spec.n_points)
    return SampleSet(x, y, z, label)


def simulate_stationary_field(spec: FieldSpec, sill: float, range_: float) -> SampleSet:
    """Second-order stationary field with exponential covariance
    ``C(h) = sill * exp(-h / range_)``.

    Its variogram is bounded by ``sill`` and rises with slope ``sill/range_``
    near the origin. ``spec.slope`` and ``spec.nugget`` are ignored.
    """
    if sill <= 0 or range_ <= 0:
        raise SimulationError("sill and range must be positive")
    rng = _rng(spec.seed)
    x, y = _uniform_points(rng, spec.n_points, spec.domain)
    K = sill * np.exp(-_distances(x, y) / range_)
    z = _gaussian(K, rng)
    return SampleSet(x, y, z, f"exponential sill={sill:g} range={range_:g} seed={spec.seed}")
