"""Spectral error-disturbance relations for continuously measured linear systems."""

from .edr import (
    InequalityVerdict,
    branciard,
    braginsky_check,
    correlated_bound,
    heisenberg,
    ozawa,
    robertson,
    saturation_boundary,
    spectral_branciard_unnormalized,
    spectral_ozawa_unnormalized,
)
from .model import (
    DimensionlessParams,
    NormalizedSpectra,
    PhysicalParams,
    SpectralPoint,
    error_disturbance_spectra,
    normalized_point,
)
from .sweep import closed_form_sigma_opt, frequency_sweep, optimize_sigma

__version__ = "0.1.0"

__all__ = [
    "DimensionlessParams",
    "InequalityVerdict",
    "NormalizedSpectra",
    "PhysicalParams",
    "SpectralPoint",
    "braginsky_check",
    "branciard",
    "closed_form_sigma_opt",
    "correlated_bound",
    "error_disturbance_spectra",
    "frequency_sweep",
    "heisenberg",
    "normalized_point",
    "optimize_sigma",
    "ozawa",
    "robertson",
    "saturation_boundary",
    "spectral_branciard_unnormalized",
    "spectral_ozawa_unnormalized",
]
