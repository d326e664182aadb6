"""Sampling Gaussian sections, finding their zeros, and estimating variances."""

from .roots import RootFindingError, ZeroSet, polynomial_roots, zeros_of_section
from .sampling import SectionSample, sample_section
from .statistics import MCEstimate, RejectionError, linear_statistic, mc_number_variance, mc_variance

__all__ = [
    "MCEstimate",
    "RejectionError",
    "RootFindingError",
    "SectionSample",
    "ZeroSet",
    "linear_statistic",
    "mc_number_variance",
    "mc_variance",
    "polynomial_roots",
    "sample_section",
    "zeros_of_section",
]
