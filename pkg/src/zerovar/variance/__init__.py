"""Exact, asymptotic and combinatorial pieces of the variance computation."""

from .asymptotics import (
    AsymptoticCoefficients,
    CoefficientIntegrals,
    asymptotic_coefficients,
    asymptotic_variance,
    coefficient_integrals,
)
from .combinatorics import curvature_contraction, multinomial_expand, wick_moment
from .exact import (
    QuadratureError,
    QuadratureSpec,
    VarianceResult,
    bruteforce_variance,
    exact_variance,
    zonal_variance_oracle,
)
from .fit import FitError, FitResult, fit_expansion
from .gint import gint_identity_residual

__all__ = [
    "AsymptoticCoefficients",
    "CoefficientIntegrals",
    "FitError",
    "FitResult",
    "QuadratureError",
    "QuadratureSpec",
    "VarianceResult",
    "asymptotic_coefficients",
    "asymptotic_variance",
    "bruteforce_variance",
    "coefficient_integrals",
    "curvature_contraction",
    "exact_variance",
    "fit_expansion",
    "gint_identity_residual",
    "multinomial_expand",
    "wick_moment",
    "zonal_variance_oracle",
]
