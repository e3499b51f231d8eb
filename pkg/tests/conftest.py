import datetime as dt

import numpy as np
import pytest


def daily_csv(codes, years, rng, drop_fraction=0.0, planted=None):
    """Long-format daily CSV for ``codes`` over whole calendar ``years``.

    ``planted`` maps code -> (day_index, value) for a spike in every year.
    """
    lines = ["station_code,date,precip_mm"]
    start = dt.date(years[0], 1, 1)
    end = dt.date(years[-1], 12, 31)
    n = (end - start).days + 1
    for code in codes:
        vals = np.round(rng.gamma(0.4, 6.0, n), 1)
        if planted and code in planted:
            day, value = planted[code]
            for y in years:
                off = (dt.date(y, 1, 1) - start).days + day
                vals[off] = round(value, 3)
        drop = rng.random(n) < drop_fraction
        for i in range(n):
            d = start + dt.timedelta(days=i)
            v = "" if drop[i] else repr(float(vals[i]))
            lines.append(f"{code},{d.isoformat()},{v}")
    return "\n".join(lines) + "\n"


def stations_csv(codes, lons, lats):
    lines = ["code,name,lat,lon,network"]
    for c, lo, la in zip(codes, lons, lats):
        lines.append(f"{c},S{c},{la:.4f},{lo:.4f},SYN")
    return "\n".join(lines) + "\n"


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# acceptance criteria report, filled by tests/test_acceptance.py
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])
