"""Band-pass filtered second moments and the filtered Ozawa inequality.

Only |Gamma(x)|^2 enters any of the filtered quantities, so a filter is just
a real, non-negative weight on a finite band of x = Omega/omega_m.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from . import model
from .edr import InequalityVerdict, ozawa as ozawa_normalized

QUAD_TOL = 1e-10

SHAPES = ("rectangular", "triangular")


@dataclass(frozen=True)
class FilterSpec:
    center: float
    width: float
    shape: str = "rectangular"
    gain: float = 1.0

    def __post_init__(self):
        if self.shape not in SHAPES:
            raise ValueError(f"unknown filter shape {self.shape!r}")
        if not (self.width > 0 and math.isfinite(self.width)):
            raise ValueError("filter width must be > 0")
        if not (self.gain >= 0 and math.isfinite(self.gain)):
            raise ValueError("filter gain must be >= 0")
        if not self.lo > 0:
            raise ValueError("filter band must lie inside (0, inf)")

    @property
    def lo(self) -> float:
        return self.center - 0.5 * self.width

    @property
    def hi(self) -> float:
        return self.center + 0.5 * self.width

    def power(self, x):
        """|Gamma(x)|^2."""
        x = np.asarray(x, dtype=float)
        inside = (x >= self.lo) & (x <= self.hi)
        if self.shape == "rectangular":
            w = np.where(inside, 1.0, 0.0)
        else:
            w = np.where(inside, 1.0 - np.abs(x - self.center) / (0.5 * self.width), 0.0)
        return self.gain**2 * w

    @property
    def bandwidth(self) -> float:
        """(1/2pi) int |Gamma|^2 dx, the factor shared by every narrowband moment."""
        area = self.width if self.shape == "rectangular" else 0.5 * self.width
        return self.gain**2 * area / (2.0 * math.pi)


def filtered_moment(filt: FilterSpec, spectrum) -> float:
    """(1/2pi) int_0^inf |Gamma(x)|^2 S(x) dx by adaptive quadrature over the band."""
    if filt.gain == 0:
        return 0.0

    def integrand(x):
        value = spectrum(x)
        if not np.isfinite(value):
            raise ValueError(f"spectrum is not finite at x={x!r}")
        return float(filt.power(x)) * float(value)

    points = [filt.center] if filt.shape == "triangular" else None
    value, _ = integrate.quad(
        integrand, filt.lo, filt.hi, epsabs=QUAD_TOL, epsrel=QUAD_TOL, points=points, limit=200
    )
    return value / (2.0 * math.pi)


def spectrum_functions(rho, sigma):
    """Scalar callables for the coherent-probe spectra at fixed (rho, sigma)."""
    s_q0, s_f0, _ = model.probe_spectra(sigma)

    def s_eps(x):
        return s_q0 + s_f0 / model.pole_product(x, rho)

    def s_eta(x):
        return s_f0 * x * x / model.pole_product(x, rho)

    def s_x0(x):
        return model.zero_point_spectra(x, rho)[0]

    def s_p0(x):
        return model.zero_point_spectra(x, rho)[1]

    def chi(x):
        return model.susceptibility_chi(x, rho)

    return {"s_eps": s_eps, "s_eta": s_eta, "s_x0": s_x0, "s_p0": s_p0, "chi": chi}


@dataclass(frozen=True)
class FilteredMoments:
    eps2: float
    eta2: float
    var_a: float
    var_b: float
    commutator: float  # |C_AB| of the filtered observables


def filtered_moments(filt: FilterSpec, rho, sigma, spectra=None) -> FilteredMoments:
    fns = spectra if spectra is not None else spectrum_functions(rho, sigma)
    # |C| = (hbar/2) |int_{-inf}^{inf} dx/2pi chi |Gamma|^2|, and chi|Gamma|^2 is even in x.
    commutator = 0.5 * model.HBAR * abs(filtered_moment(filt, lambda x: 2.0 * fns["chi"](x)))
    return FilteredMoments(
        eps2=filtered_moment(filt, fns["s_eps"]),
        eta2=filtered_moment(filt, fns["s_eta"]),
        var_a=filtered_moment(filt, fns["s_x0"]),
        var_b=filtered_moment(filt, fns["s_p0"]),
        commutator=commutator,
    )


def filtered_ozawa(filt: FilterSpec, rho, sigma, spectra=None) -> InequalityVerdict:
    m = filtered_moments(filt, rho, sigma, spectra)
    eps, eta = math.sqrt(m.eps2), math.sqrt(m.eta2)
    sa, sb = math.sqrt(m.var_a), math.sqrt(m.var_b)
    return InequalityVerdict("ozawa", eps * eta + eps * sb + sa * eta, m.commutator)


@dataclass(frozen=True)
class NarrowbandRow:
    width: float
    ratios: dict  # filtered / (bandwidth * spectral value at center), per field
    filtered_margin: float  # filtered Ozawa margin divided by the bandwidth
    spectral_margin: float
    filtered_satisfied: bool
    spectral_satisfied: bool


def narrowband_reduction(x0, rho, sigma, widths, shape="rectangular", spectra=None) -> list[NarrowbandRow]:
    """Compare filtered moments with bandwidth * spectrum at ``x0`` for shrinking bands.

    ``spectra`` optionally replaces the model spectra by a dict of callables
    with the same keys as :func:`spectrum_functions`.
    """
    widths = [float(w) for w in widths]
    if any(b >= a for a, b in zip(widths, widths[1:])):
        raise ValueError("widths must be strictly decreasing")
    fns = spectra if spectra is not None else spectrum_functions(rho, sigma)
    params = model.DimensionlessParams(x0, rho, sigma)
    spectral = ozawa_normalized(model.normalize(model.error_disturbance_spectra(params)))
    scale = math.sqrt(fns["s_x0"](x0) * fns["s_p0"](x0))

    rows = []
    for width in widths:
        filt = FilterSpec(center=x0, width=width, shape=shape)
        g = filt.bandwidth
        ratios = {
            name: filtered_moment(filt, fn) / (g * fn(x0)) for name, fn in fns.items()
        }
        verdict = filtered_ozawa(filt, rho, sigma, fns)
        rows.append(
            NarrowbandRow(
                width=width,
                ratios=ratios,
                # normalised like the spectral form so the two margins are comparable
                filtered_margin=verdict.margin / (g * scale),
                spectral_margin=spectral.margin,
                filtered_satisfied=verdict.satisfied,
                spectral_satisfied=spectral.satisfied,
            )
        )
    return rows
