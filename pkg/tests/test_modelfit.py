import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rainvario import fixtures
from rainvario.modelfit import (
    FitError, LinearVariogramFit, fit_linear, format_fits, parse_fits,
    percent_variance_explained,
)
from rainvario.variogram import EmpiricalVariogram, LagBin, parse_variogram
from oracles import normal_equations


def vario(h, v, n=None):
    n = [10] * len(h) if n is None else n
    return EmpiricalVariogram(0.25, 5.0, tuple(LagBin(i, int(c), float(a), float(b))
                                              for i, (c, a, b) in enumerate(zip(n, h, v))))


H = [0.1, 0.4, 0.6, 0.9, 1.1, 1.4]


def test_exact_line():
    f = fit_linear(vario(H, [1000 + 2000 * h for h in H], n=[3, 9, 4, 12, 7, 5]))
    assert f.c0 == pytest.approx(1000, rel=1e-12)
    assert f.b == pytest.approx(2000, rel=1e-12)
    assert f.pct_explained == pytest.approx(100, abs=1e-9)


def test_constant_v():
    f = fit_linear(vario(H, [7.0] * len(H), n=[3, 9, 4, 12, 7, 5]))
    assert f.b == 0 and f.c0 == 7.0
    assert f.pct_explained == 0.0


def test_preconditions():
    with pytest.raises(FitError, match="at least 3"):
        fit_linear(vario([0.1, 0.4], [1, 2]))
    with pytest.raises(FitError, match="degenerate"):
        fit_linear(vario([0.5, 0.5, 0.5], [1, 2, 3]))


def test_negative_nugget_is_reported_not_clipped():
    f = fit_linear(vario([1, 2, 3], [1, 3, 5]))
    assert f.c0 == pytest.approx(-1) and "negative nugget" in f.warnings


def test_table1_against_normal_equations():
    v = parse_variogram(fixtures.text("table1"))
    f = fit_linear(v, weighted=True)
    c0, b = normal_equations(v.h, v.v, v.n)
    assert f.c0 == pytest.approx(c0, rel=1e-9)
    assert f.b == pytest.approx(b, rel=1e-9)
    u = fit_linear(v, weighted=False)
    c0u, bu = normal_equations(v.h, v.v, np.ones(len(v)))
    assert (u.c0, u.b) == (pytest.approx(c0u, rel=1e-9), pytest.approx(bu, rel=1e-9))


def test_pct_formula_by_hand():
    h, v = [1.0, 2.0, 3.0, 4.0], [1.0, 3.0, 2.0, 5.0]
    f = fit_linear(vario(h, v), weighted=False)
    # line: b = 1.1, c0 = 0 ; residuals -0.1, 0.8, -1.3, 0.6 -> SSres 2.7 ; SStot 8.75
    assert (f.c0, f.b) == (pytest.approx(0.0, abs=1e-12), pytest.approx(1.1))
    assert f.pct_explained == pytest.approx(100 * (1 - (2.7 / 2) / (8.75 / 3)))


def test_pct_is_clamped_at_zero():
    f = fit_linear(vario([1, 2, 3, 4], [1, 3, 1, 3]), weighted=False)
    assert f.pct_explained == 0.0


def test_percent_variance_explained_agrees_with_fit():
    v = parse_variogram(fixtures.text("table1"))
    for weighted in (True, False):
        f = fit_linear(v, weighted)
        assert percent_variance_explained(v, f) == f.pct_explained


def test_pure_noise_is_mostly_unexplained():
    rng = np.random.default_rng(2024)
    h = (np.arange(20) + 0.5) * 0.25
    pcts = []
    for _ in range(1000):
        v = 1000 + rng.normal(0, 100, 20)
        n = rng.integers(10, 90, 20)
        pcts.append(fit_linear(vario(h, v, n)).pct_explained)
    assert np.median(pcts) < 15


# ------------------------------------------------------------ invariants

seeds = st.integers(0, 2**32 - 1)


def random_vario(seed, n_bins=None):
    r = np.random.default_rng(seed)
    k = n_bins or int(r.integers(3, 21))
    idx = np.sort(r.choice(20, k, replace=False))
    h = (idx + r.uniform(0.05, 0.95, k)) * 0.25
    v = r.uniform(0, 2e4, k)
    n = r.integers(1, 100, k)
    return EmpiricalVariogram(0.25, 5.0, tuple(LagBin(int(i), int(c), float(a), float(b))
                                              for i, c, a, b in zip(idx, n, h, v)))


def with_v(v, new_v):
    return EmpiricalVariogram(v.bin_width, v.max_lag, tuple(
        LagBin(b.index, b.n, b.h, float(x)) for b, x in zip(v.bins, new_v)))


@settings(max_examples=100, deadline=None)
@given(seeds, st.integers(-10, 10))
def test_power_of_two_v_scaling_is_exact(seed, e):
    v = random_vario(seed)
    a = 2.0 ** e
    f, g = fit_linear(v), fit_linear(with_v(v, a * v.v))
    assert (g.c0, g.b, g.pct_explained) == (a * f.c0, a * f.b, f.pct_explained)


@settings(max_examples=100, deadline=None)
@given(seeds, st.floats(1e-3, 1e3))
def test_v_scaling(seed, a):
    v = random_vario(seed)
    f, g = fit_linear(v), fit_linear(with_v(v, a * v.v))
    assert g.c0 == pytest.approx(a * f.c0, rel=1e-9, abs=1e-6 * a)
    assert g.b == pytest.approx(a * f.b, rel=1e-9, abs=1e-6 * a)
    assert g.pct_explained == pytest.approx(f.pct_explained, abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(seeds, st.floats(-1e4, 1e4))
def test_v_shift(seed, c):
    v = random_vario(seed)
    f, g = fit_linear(v), fit_linear(with_v(v, v.v + c))
    assert g.c0 == pytest.approx(f.c0 + c, abs=1e-7 * (1 + abs(c) + abs(f.c0)))
    assert g.b == pytest.approx(f.b, rel=1e-9, abs=1e-7)
    assert g.pct_explained == pytest.approx(f.pct_explained, abs=1e-7)


@settings(max_examples=100, deadline=None)
@given(seeds, st.integers(1, 500))
def test_equal_weights_match_unweighted_bitwise(seed, n):
    v = random_vario(seed)
    v = EmpiricalVariogram(v.bin_width, v.max_lag, tuple(LagBin(b.index, n, b.h, b.v) for b in v.bins))
    f, g = fit_linear(v, True), fit_linear(v, False)
    assert (f.c0, f.b, f.pct_explained) == (g.c0, g.b, g.pct_explained)


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_bin_order_irrelevant(seed):
    v = random_vario(seed)
    rev = EmpiricalVariogram(v.bin_width, v.max_lag, tuple(reversed(v.bins)))
    assert fit_linear(rev) == fit_linear(v)


def test_fits_csv_roundtrip():
    f = LinearVariogramFit(4572.5, 2331.25, 74.75, 20, True)
    text = format_fits([(1997, "MaxI", 3, f)])
    assert text == "year,variable,k,n_bins,c0,b,pct,weighted\n1997,MaxI,3,20,4572.5,2331.25,74.75,true\n"
    [row] = parse_fits(text)
    assert row["fit"] == f and row["variable"] == "MaxI"


def test_plain_pct_mode():
    h, v = [1.0, 2.0, 3.0, 4.0], [1.0, 3.0, 2.0, 5.0]
    f = fit_linear(vario(h, v), weighted=False, pct_mode="plain")
    assert f.pct_explained == pytest.approx(100 * (1 - 2.7 / 8.75))
    assert percent_variance_explained(vario(h, v), f) == f.pct_explained
    with pytest.raises(ValueError):
        fit_linear(vario(h, v), pct_mode="r2")


def test_plain_never_below_adjusted():
    v = parse_variogram(fixtures.text("table1"))
    assert fit_linear(v, pct_mode="plain").pct_explained >= fit_linear(v).pct_explained
