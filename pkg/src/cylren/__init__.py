"""Numerical laboratory for cylinder renormalization of golden-mean Siegel maps.

The package builds the full pipeline: polynomial Siegel maps with their
weighted coefficient norms, fast Cauchy/Hilbert transforms on a polar grid,
a constructive Beltrami-equation solver, fundamental-crescent uniformization,
the cylinder renormalization operator, and spectral analysis of its
linearization at the fixed point.
"""

from cylren.analytic_map import AnalyticMap, GOLDEN_FRAC, SIEGEL_MULTIPLIER

__all__ = ["AnalyticMap", "GOLDEN_FRAC", "SIEGEL_MULTIPLIER"]

__version__ = "0.1.0"
