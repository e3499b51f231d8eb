"""Bundled reference tables (station catalog, variogram example, yearly
percentages, year categories, ENSO phases)."""
from __future__ import annotations

from importlib import resources

FILES = {
    "stations": "stations.csv",
    "table1": "table1_variogram.csv",
    "table3": "table3_percentages.csv",
    "table3_summary": "table3_summary.csv",
    "table4": "table4_categories.csv",
    "enso": "enso.csv",
}


def path(name: str):
    return resources.files("rainvario") / "data" / FILES[name]


def text(name: str) -> str:
    return path(name).read_text(encoding="utf-8")
