"""Frequency sweeps, the optimal disturbance strength, and regime labels."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import edr, model

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0

# Presentation thresholds on S_eps_t / S_eta_t at resonance (not physics).
ERROR_DOMINATED_RATIO = 10.0
BACKACTION_DOMINATED_RATIO = 1.5

REGIMES = ("error-dominated", "tradeoff", "back-action-dominated")


class BracketError(RuntimeError):
    pass


@dataclass(frozen=True)
class SweepRow:
    x: float
    spectra: model.NormalizedSpectra
    heisenberg: edr.InequalityVerdict
    ozawa: edr.InequalityVerdict
    branciard: edr.InequalityVerdict
    robertson: edr.InequalityVerdict


@dataclass(frozen=True)
class SweepResult:
    rho: float
    sigma: float
    grid: list
    rows: list

    def column(self, name):
        """Array of one plotted quantity across the grid."""
        if name in ("s_eps_t", "s_eta_t", "chi_t"):
            return np.array([getattr(r.spectra, name) for r in self.rows])
        if name.endswith("_lhs"):
            return np.array([getattr(r, name[:-4]).lhs for r in self.rows])
        raise KeyError(name)


@dataclass(frozen=True)
class Optimum:
    rho: float
    sigma_opt_numeric: float
    sigma_opt_closed_form: float
    min_lhs: float
    x_eval: float
    objective: str = "resonance"

    @property
    def floor_gap(self) -> float:
        return self.min_lhs - math.sqrt(2.0)


def frequency_sweep(rho, sigma, grid) -> SweepResult:
    grid = [float(x) for x in grid]
    ns = model.normalized_arrays(np.asarray(grid), rho, sigma)
    rows = []
    for i, x in enumerate(grid):
        point = model.NormalizedSpectra(
            s_eps_t=float(ns.s_eps_t[i]), s_eta_t=float(ns.s_eta_t[i]), chi_t=float(ns.chi_t[i])
        )
        rows.append(
            SweepRow(
                x=x,
                spectra=point,
                heisenberg=edr.heisenberg(point),
                ozawa=edr.ozawa(point),
                branciard=edr.branciard(point),
                robertson=edr.robertson(point),
            )
        )
    return SweepResult(rho=rho, sigma=sigma, grid=grid, rows=rows)


def closed_form_sigma_opt(rho) -> float:
    if not rho > 0:
        raise ValueError("rho must be > 0")
    return rho * math.sqrt(1.0 + rho * rho / 16.0) / (8.0 * math.sqrt(2.0))


def golden_section(f, lo, hi, tol):
    """Minimise a unimodal ``f`` on [lo, hi]; returns (argmin, f(argmin))."""
    a, b = lo, hi
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def branciard_lhs_at(x, rho, sigma) -> float:
    ns = model.normalized_arrays(x, rho, sigma)
    return float(edr.branciard_lhs(ns.s_eps_t, ns.s_eta_t, ns.chi_t))


def optimize_sigma(rho, x_eval=1.0, bracket=(1e-4, 1.0), tol=1e-10, objective="resonance", grid=None) -> Optimum:
    """Golden-section search over log(sigma) for the smallest Branciard LHS.

    ``objective="resonance"`` minimises the LHS at ``x_eval``;
    ``"frequency_min"`` minimises its minimum over ``grid`` instead.
    """
    if not rho > 0:
        raise ValueError("rho must be > 0")
    if objective == "resonance":
        def f(log_sigma):
            return branciard_lhs_at(x_eval, rho, math.exp(log_sigma))
    elif objective == "frequency_min":
        xs = np.asarray(grid if grid is not None else np.linspace(0.1, 3.0, 500), dtype=float)

        def f(log_sigma):
            ns = model.normalized_arrays(xs, rho, math.exp(log_sigma))
            return float(np.min(edr.branciard_lhs(ns.s_eps_t, ns.s_eta_t)))
    else:
        raise ValueError(f"unknown objective {objective!r}")

    lo, hi = math.log(bracket[0]), math.log(bracket[1])
    # d(sigma) <= sigma_max * d(log sigma), so this bounds the error in sigma by tol
    log_tol = tol / bracket[1]
    log_sigma, f_min = golden_section(f, lo, hi, log_tol)
    if log_sigma - lo < 10 * log_tol or hi - log_sigma < 10 * log_tol:
        raise BracketError(
            f"minimum at bracket edge sigma={math.exp(log_sigma):.6g}; bracket {bracket} does not contain it"
        )
    return Optimum(
        rho=rho,
        sigma_opt_numeric=math.exp(log_sigma),
        sigma_opt_closed_form=closed_form_sigma_opt(rho),
        min_lhs=f_min,
        x_eval=x_eval,
        objective=objective,
    )


def classify_regime(rho, sigma, x=1.0) -> str:
    ns = model.normalized_point(model.DimensionlessParams(x, rho, sigma))
    ratio = ns.s_eps_t / ns.s_eta_t
    if ratio > ERROR_DOMINATED_RATIO:
        return "error-dominated"
    if ratio < BACKACTION_DOMINATED_RATIO:
        return "back-action-dominated"
    return "tradeoff"


def classify_regimes(rho, sigmas, x=1.0) -> list[str]:
    return [classify_regime(rho, s, x) for s in sigmas]


def fig2_sigmas(rho=0.3):
    """The three disturbance strengths of the damped-oscillator figure."""
    s = closed_form_sigma_opt(rho)
    return [s / 5.0, s, 20.0 * s]
