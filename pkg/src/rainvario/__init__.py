"""Spatial and temporal coherence of annual maximum rainfall via linear semivariograms."""

__version__ = "0.1.0"
