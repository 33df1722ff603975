"""Cusp excursions of geodesics on hyperbolic orbifolds and rational approximation."""

__version__ = "0.1.0"
