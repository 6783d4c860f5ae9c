"""Temporally correlated PV power scenario modeling.

Quantile-regression marginals coupled by Gaussian or regular-vine
copulas, multivariate scenario generation, adjusted-interval multivariate
prediction intervals, and verification scores.
"""

__version__ = "0.1.0"
