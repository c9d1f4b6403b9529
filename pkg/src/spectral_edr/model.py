"""Analytic spectra of a damped oscillator read out by a coherent optical probe.

Everything here works in the internal unit system hbar = m = omega_m = 1, so
the plant is described by the frequency ratio ``x = Omega/omega_m``, the
damping ratio ``rho = kappa_m/omega_m`` and the disturbance strength
``sigma = I0*omega0/(m*c**2*omega_m**2)``.  All spectra are one-sided and per
angular frequency: ``<X**2> = (1/2pi) * int_0^inf S_X dOmega``.

Functions accept scalars or numpy arrays for ``x``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

HBAR = 1.0  # internal units


class BraginskyViolation(ValueError):
    """A probe noise model violates S_Q S_F - S_FQ**2 >= hbar**2."""


@dataclass(frozen=True)
class DimensionlessParams:
    x: float
    rho: float
    sigma: float

    def __post_init__(self):
        for name in ("x", "rho", "sigma"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be a finite positive number, got {value!r}")


@dataclass(frozen=True)
class PhysicalParams:
    """SI description of the oscillator and the probe laser."""

    mass: float
    omega_m: float
    kappa_m: float
    laser_power: float
    carrier_omega: float
    hbar: float = 1.054571817e-34
    c: float = 299792458.0

    def __post_init__(self):
        for name, value in self.__dict__.items():
            if not (np.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be a finite positive number, got {value!r}")

    @property
    def rho(self) -> float:
        return self.kappa_m / self.omega_m

    @property
    def sigma(self) -> float:
        return self.laser_power * self.carrier_omega / (self.mass * self.c**2 * self.omega_m**2)

    def dimensionless(self, omega: float) -> DimensionlessParams:
        return DimensionlessParams(x=omega / self.omega_m, rho=self.rho, sigma=self.sigma)

    # Unit scales that map internal-unit spectra back to SI.
    @property
    def position_psd_unit(self) -> float:
        # S_x: m^2 s, internal unit hbar/(m omega_m^2)
        return self.hbar / (self.mass * self.omega_m**2)

    @property
    def momentum_psd_unit(self) -> float:
        # S_p: kg^2 m^2 s^-1, internal unit hbar*m
        return self.hbar * self.mass

    @property
    def force_psd_unit(self) -> float:
        # S_F: N^2 s, internal unit hbar*m*omega_m^2
        return self.hbar * self.mass * self.omega_m**2

    @property
    def susceptibility_unit(self) -> float:
        # chi: s, so that hbar*chi matches sqrt(S_x S_p)
        return 1.0 / self.omega_m


@dataclass(frozen=True)
class SpectralPoint:
    """All plant and probe spectra at one frequency (fields may be arrays)."""

    x: float
    s_q0: float
    s_f0: float
    s_f0q0: float
    s_x0: float
    s_p0: float
    s_eps: float
    s_eta: float
    chi: float

    def scaled(self, c: float) -> "SpectralPoint":
        """Multiply every spectrum, and hbar*chi, by ``c``."""
        return SpectralPoint(
            x=self.x,
            s_q0=c * self.s_q0,
            s_f0=c * self.s_f0,
            s_f0q0=c * self.s_f0q0,
            s_x0=c * self.s_x0,
            s_p0=c * self.s_p0,
            s_eps=c * self.s_eps,
            s_eta=c * self.s_eta,
            chi=c * self.chi,
        )


@dataclass(frozen=True)
class NormalizedSpectra:
    s_eps_t: float
    s_eta_t: float
    chi_t: float


def _positive_x(x):
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise ValueError("frequency ratio x must be > 0 (one-sided spectra)")
    return x


def _positive(name, value):
    if not np.all(np.isfinite(value) & (np.asarray(value) > 0)):
        raise ValueError(f"{name} must be a finite positive number, got {value!r}")


def pole_product(x, rho):
    """d(x, rho) = ((x+1)^2 + rho^2/4)((x-1)^2 + rho^2/4) = |poles|^2."""
    x = np.asarray(x, dtype=float)
    q = rho * rho / 4.0
    return ((x + 1.0) ** 2 + q) * ((x - 1.0) ** 2 + q)


def response_xx(x, rho):
    """Position response to force, from the two-pole form."""
    x = np.asarray(x, dtype=float)
    half = 0.5j * rho
    r = 0.5 * (1.0 / (x + 1.0 + half) - 1.0 / (x - 1.0 + half))
    return r[()] if r.ndim == 0 else r


def response_xp(x, rho):
    """Position response to the momentum coupling, using W and theta."""
    x = np.asarray(x, dtype=float)
    w = np.sqrt(4.0 + np.asarray(rho, dtype=float) ** 2)
    theta = np.arctan(-np.asarray(rho, dtype=float) / 2.0)
    half = 0.5j * rho
    r = -0.25j * w * (
        np.exp(-1j * theta) / (x + 1.0 + half) + np.exp(1j * theta) / (x - 1.0 + half)
    )
    return r[()] if r.ndim == 0 else r


def response_px(x, rho):
    """Momentum response to force; equals -i x R_xx(x)."""
    return -response_xp(x, rho)


def susceptibility_chi(x, rho):
    """chi = 2 rho x^2 / d(x, rho), the commutator density of x0 and p0."""
    x = _positive_x(x)
    chi = 2.0 * rho * x * x / pole_product(x, rho)
    return chi[()] if chi.ndim == 0 else chi


def susceptibility_from_responses(x, rho):
    """chi via [x0(W), p0^dag(W')] = -2 pi i hbar delta {R_xp - R_px^*}.

    Independent of the closed form above; returns the real part and checks
    the imaginary part is zero to rounding.
    """
    x = _positive_x(x)
    chi = -(response_xp(x, rho) - np.conj(response_px(x, rho)))
    if np.any(np.abs(np.imag(chi)) > 1e-10 * np.maximum(1.0, np.abs(chi))):
        raise ArithmeticError("commutator density acquired an imaginary part")
    chi = np.real(chi)
    return chi[()] if np.ndim(chi) == 0 else chi


def zero_point_spectra(x, rho):
    """Return (S_x0, S_p0) from the fluctuation-dissipation theorem."""
    x = _positive_x(x)
    s_x0 = 2.0 * rho * x / pole_product(x, rho)
    s_p0 = x * x * s_x0
    if s_x0.ndim == 0:
        return s_x0[()], s_p0[()]
    return s_x0, s_p0


def probe_spectra(sigma):
    """Coherent probe: (S_Q0, S_F0, S_F0Q0) = (1/(8 sigma), 8 sigma, 0)."""
    _positive("sigma", sigma)
    return 1.0 / (8.0 * sigma), 8.0 * sigma, 0.0


def saturating_probe(sigma, s_f0q0):
    """A probe with real cross-spectrum that saturates the Braginsky bound."""
    _, s_f0, _ = probe_spectra(sigma)
    s_q0 = (HBAR**2 + s_f0q0 * s_f0q0) / s_f0
    return s_q0, s_f0, s_f0q0


def spectra_from_probe(x, rho, s_q0, s_f0, s_f0q0=0.0) -> SpectralPoint:
    """Error and disturbance spectra for arbitrary (real cross) probe noise."""
    x = _positive_x(x)
    r_xx = response_xx(x, rho)
    r_px = response_px(x, rho)
    s_x0, s_p0 = zero_point_spectra(x, rho)
    s_eps = s_q0 + np.abs(r_xx) ** 2 * s_f0 + 2.0 * np.real(r_xx * s_f0q0)
    s_eta = np.abs(r_px) ** 2 * s_f0
    return SpectralPoint(
        x=x[()] if x.ndim == 0 else x,
        s_q0=s_q0,
        s_f0=s_f0,
        s_f0q0=s_f0q0,
        s_x0=s_x0,
        s_p0=s_p0,
        s_eps=s_eps[()] if np.ndim(s_eps) == 0 else s_eps,
        s_eta=s_eta[()] if np.ndim(s_eta) == 0 else s_eta,
        chi=susceptibility_chi(x, rho),
    )


def physical_spectra(pp: PhysicalParams, omega) -> SpectralPoint:
    """Coherent-probe spectra evaluated directly in SI units at angular frequency ``omega``."""
    omega = _positive_x(omega)
    m, w, k, hbar, c = pp.mass, pp.omega_m, pp.kappa_m, pp.hbar, pp.c
    i0w0 = pp.laser_power * pp.carrier_omega
    denom = ((omega + w) ** 2 + k * k / 4.0) * ((omega - w) ** 2 + k * k / 4.0)
    r_xx = (1.0 / (2.0 * m * w)) * (1.0 / (omega + w + 0.5j * k) - 1.0 / (omega - w + 0.5j * k))
    big_w = math.sqrt(4.0 * w * w + k * k)
    theta = math.atan(-k / (2.0 * w))
    r_xp = -1j * big_w / (4.0 * w) * (
        np.exp(-1j * theta) / (omega + w + 0.5j * k) + np.exp(1j * theta) / (omega - w + 0.5j * k)
    )
    r_px = -r_xp
    s_q0 = hbar * c * c / (8.0 * i0w0)
    s_f0 = 8.0 * i0w0 * hbar / (c * c)
    s_x0 = 2.0 * hbar * k * omega / (m * denom)
    return SpectralPoint(
        x=omega / w,
        s_q0=s_q0,
        s_f0=s_f0,
        s_f0q0=0.0,
        s_x0=s_x0,
        s_p0=m * m * omega * omega * s_x0,
        s_eps=s_q0 + np.abs(r_xx) ** 2 * s_f0,
        s_eta=np.abs(r_px) ** 2 * s_f0,
        chi=2.0 * k * omega * omega / denom,
    )


def error_disturbance_spectra(params: DimensionlessParams, s_f0q0_override: float | None = None) -> SpectralPoint:
    if s_f0q0_override is None:
        probe = probe_spectra(params.sigma)
    else:
        from .edr import braginsky_check  # local: edr imports this module

        probe = saturating_probe(params.sigma, s_f0q0_override)
        verdict = braginsky_check(probe[0], probe[1], probe[2], chi=-1.0)
        if not verdict.satisfied:
            raise BraginskyViolation(
                f"Braginsky inequality violated by override S_F0Q0={s_f0q0_override!r}: "
                f"S_Q S_F - S_FQ^2 = {verdict.lhs!r} < {verdict.rhs!r}"
            )
    return spectra_from_probe(params.x, params.rho, *probe)


def normalize(sp: SpectralPoint) -> NormalizedSpectra:
    """Ratio path: divide by the free-evolution spectra."""
    scale = np.sqrt(sp.s_x0 * sp.s_p0)
    return NormalizedSpectra(
        s_eps_t=sp.s_eps / sp.s_x0,
        s_eta_t=sp.s_eta / sp.s_p0,
        chi_t=HBAR * sp.chi / scale,
    )


def normalized_point(params: DimensionlessParams) -> NormalizedSpectra:
    """Closed dimensionless forms; chi_t is identically 1 for this plant."""
    return normalized_arrays(params.x, params.rho, params.sigma)


def normalized_arrays(x, rho, sigma) -> NormalizedSpectra:
    x = _positive_x(x)
    _positive("rho", rho)
    _positive("sigma", sigma)
    d = pole_product(x, rho)
    s_eta_t = 4.0 * sigma / (rho * x)
    s_eps_t = d / (16.0 * sigma * rho * x) + s_eta_t
    if x.ndim == 0:
        return NormalizedSpectra(s_eps_t=float(s_eps_t), s_eta_t=float(s_eta_t), chi_t=1.0)
    return NormalizedSpectra(s_eps_t=s_eps_t, s_eta_t=s_eta_t, chi_t=np.ones_like(s_eps_t))
