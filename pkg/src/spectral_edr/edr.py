"""Spectral error-disturbance inequalities and their saturation loci."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import HBAR, NormalizedSpectra, SpectralPoint

TOL = 1e-12  # satisfaction tolerance on the margin
RADICAND_TOL = 1e-12  # clamp window for the Branciard square root

KINDS = ("heisenberg", "ozawa", "branciard", "robertson", "braginsky", "correlated_bound")
BOUNDARY_KINDS = ("heisenberg", "ozawa", "branciard")


class RobertsonViolation(ValueError):
    """Input spectra with |chi_t| > 1, for which the Branciard radical is imaginary."""


@dataclass(frozen=True)
class InequalityVerdict:
    kind: str
    lhs: float
    rhs: float
    margin: float = field(init=False)
    satisfied: bool = field(init=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown inequality kind {self.kind!r}")
        margin = float(self.lhs - self.rhs)
        object.__setattr__(self, "margin", margin)
        # NaN margins compare False, so they are never reported as satisfied.
        object.__setattr__(self, "satisfied", bool(margin >= -TOL))


@dataclass(frozen=True)
class BoundaryCurve:
    kind: str
    points: list  # (s_eps_t, s_eta_t) pairs


def _clamped_sqrt(radicand, scale=1.0):
    if radicand < -RADICAND_TOL * scale:
        raise RobertsonViolation(
            f"Robertson bound violated: radicand {radicand!r} is negative beyond rounding"
        )
    return math.sqrt(max(radicand, 0.0))


# Vectorised left-hand sides (chi_t = 1 unless given); used by sweeps.

def heisenberg_lhs(s_eps_t, s_eta_t):
    return s_eps_t * s_eta_t


def ozawa_lhs(s_eps_t, s_eta_t):
    return np.sqrt(s_eps_t * s_eta_t) + np.sqrt(s_eps_t) + np.sqrt(s_eta_t)


def branciard_lhs(s_eps_t, s_eta_t, chi_t=1.0):
    radicand = 1.0 - np.abs(chi_t) ** 2
    radicand = np.where((radicand < 0) & (radicand >= -RADICAND_TOL), 0.0, radicand)
    if np.any(radicand < 0):
        raise RobertsonViolation("Robertson bound violated: |chi_t| > 1 beyond rounding")
    return s_eps_t + s_eta_t + 2.0 * np.sqrt(s_eps_t * s_eta_t * radicand)


def heisenberg(ns: NormalizedSpectra) -> InequalityVerdict:
    return InequalityVerdict("heisenberg", ns.s_eps_t * ns.s_eta_t, abs(ns.chi_t) ** 2)


def ozawa(ns: NormalizedSpectra) -> InequalityVerdict:
    lhs = math.sqrt(ns.s_eps_t * ns.s_eta_t) + math.sqrt(ns.s_eps_t) + math.sqrt(ns.s_eta_t)
    return InequalityVerdict("ozawa", lhs, abs(ns.chi_t))


def branciard(ns: NormalizedSpectra) -> InequalityVerdict:
    """Normalized Branciard form; the cross term vanishes when |chi_t| = 1."""
    chi2 = abs(ns.chi_t) ** 2
    cross = _clamped_sqrt(ns.s_eps_t * ns.s_eta_t * (1.0 - chi2), scale=max(ns.s_eps_t * ns.s_eta_t, 1.0))
    return InequalityVerdict("branciard", ns.s_eps_t + ns.s_eta_t + 2.0 * cross, chi2)


def robertson(ns: NormalizedSpectra) -> InequalityVerdict:
    return InequalityVerdict("robertson", 1.0, abs(ns.chi_t))


def spectral_ozawa_unnormalized(sp: SpectralPoint) -> InequalityVerdict:
    lhs = (
        math.sqrt(sp.s_eps * sp.s_eta)
        + math.sqrt(sp.s_eps * sp.s_p0)
        + math.sqrt(sp.s_x0 * sp.s_eta)
    )
    return InequalityVerdict("ozawa", lhs, HBAR * abs(sp.chi))


def spectral_branciard_unnormalized(sp: SpectralPoint) -> InequalityVerdict:
    """Unnormalized Branciard form.

    The clamp window is relative to S_x0*S_p0 so that the guard behaves
    identically to the normalized form under a rescaling of all spectra.
    """
    variance = sp.s_x0 * sp.s_p0
    chi2 = (HBAR * sp.chi) ** 2
    radicand = sp.s_eps * sp.s_eta * (variance - chi2)
    cross = _clamped_sqrt(radicand, scale=sp.s_eps * sp.s_eta * variance)
    lhs = sp.s_eps * sp.s_p0 + sp.s_x0 * sp.s_eta + 2.0 * cross
    return InequalityVerdict("branciard", lhs, chi2)


def braginsky_check(s_a, s_b, s_ba_real, chi) -> InequalityVerdict:
    """S_A S_B - |S_BA|^2 >= hbar^2 |chi|^2 + 2 hbar Im[chi S_BA].

    ``chi`` is the commutator density of the pair; it is -1 for the optical
    probe quadratures (Q0, F0).
    """
    if s_a < 0 or s_b < 0:
        raise ValueError("power spectra must be non-negative")
    lhs = s_a * s_b - abs(s_ba_real) ** 2
    rhs = HBAR**2 * abs(chi) ** 2 + 2.0 * HBAR * complex(chi * s_ba_real).imag
    return InequalityVerdict("braginsky", lhs, rhs)


def correlated_bound(a, b):
    """Lower bound on S_eps_t + S_eta_t for a Braginsky-saturating probe.

    ``a`` is the real probe cross-spectrum in units of hbar and ``b`` the
    ratio Re R_xx / Im R_xx.
    """
    a2 = np.square(a)
    b2 = np.square(b)
    root2 = math.sqrt(2.0)
    return np.sqrt(2.0 + (2.0 - root2) * (a2 + b2) + (3.0 - 2.0 * root2) * a2 * b2)


def correlated_verdict(s_eps_t, s_eta_t, a, b) -> InequalityVerdict:
    return InequalityVerdict("correlated_bound", s_eps_t + s_eta_t, float(correlated_bound(a, b)))


def boundary_values(kind: str, s_eps_t):
    """S_eta_t on the saturation locus at chi_t = 1; NaN where no locus exists."""
    s = np.asarray(s_eps_t, dtype=float)
    if np.any(~(s > 0)):
        raise ValueError("boundary grid values must be > 0")
    if kind == "heisenberg":
        return 1.0 / s
    if kind == "ozawa":
        u = np.sqrt(s)
        with np.errstate(invalid="ignore", divide="ignore"):
            v = np.where(u <= 1.0, ((1.0 - u) / (1.0 + u)) ** 2, np.nan)
        return v
    if kind == "branciard":
        return np.where(s <= 1.0, 1.0 - s, np.nan)
    raise ValueError(f"unknown boundary kind {kind!r}; expected one of {BOUNDARY_KINDS}")


def saturation_boundary(kind: str, s_eps_t_grid) -> BoundaryCurve:
    values = boundary_values(kind, s_eps_t_grid)
    grid = np.asarray(s_eps_t_grid, dtype=float)
    points = [(float(s), float(v)) for s, v in zip(grid, values) if np.isfinite(v)]
    return BoundaryCurve(kind=kind, points=points)


def default_boundary_grid(lo=1e-3, hi=10.0, count=400, spacing="log"):
    if spacing == "log":
        return np.geomspace(lo, hi, count)
    return np.linspace(lo, hi, count)


VERDICTS = {
    "heisenberg": heisenberg,
    "ozawa": ozawa,
    "branciard": branciard,
    "robertson": robertson,
}
