import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spectral_edr import edr, model
from spectral_edr.model import NormalizedSpectra as NS
from spectral_edr.sweep import closed_form_sigma_opt

RHO = 0.3
pos = st.floats(min_value=1e-3, max_value=10.0)


def model_point(x=1.0, rho=RHO, sigma=0.02):
    return model.error_disturbance_spectra(model.DimensionlessParams(x, rho, sigma))


class TestVerdict:
    def test_margin_and_flag(self):
        v = edr.InequalityVerdict("ozawa", 2.0, 1.5)
        assert v.margin == 0.5 and v.satisfied

    def test_tolerance_edge(self):
        assert edr.InequalityVerdict("ozawa", 1.0 - 0.5e-12, 1.0).satisfied
        assert not edr.InequalityVerdict("ozawa", 1.0 - 2e-12, 1.0).satisfied

    def test_nan_never_satisfied(self):
        assert not edr.InequalityVerdict("ozawa", float("nan"), 1.0).satisfied

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            edr.InequalityVerdict("bogus", 1.0, 1.0)


class TestHeisenberg:
    def test_unit_point(self):
        v = edr.heisenberg(NS(1.0, 1.0, 1.0))
        assert (v.lhs, v.rhs, v.margin, v.satisfied) == (1.0, 1.0, 0.0, True)

    def test_violation_example(self):
        v = edr.heisenberg(NS(3.616394, 0.070909, 1.0))
        assert v.lhs == pytest.approx(0.256436, abs=2e-6)
        assert not v.satisfied

    def test_violation_from_model(self):
        sigma = closed_form_sigma_opt(RHO) / 5
        v = edr.heisenberg(model.normalized_point(model.DimensionlessParams(1.0, RHO, sigma)))
        # S_eps_t * S_eta_t at x=1 reduces to d/(4 rho^2) * ... = 0.255 (1 + rho^2/16) exactly
        assert v.lhs == pytest.approx(0.255 * (1 + RHO**2 / 16), rel=1e-13)
        assert not v.satisfied

    def test_satisfied(self):
        assert edr.heisenberg(NS(4.0, 1.0, 1.0)).lhs == 4.0


class TestOzawa:
    def test_trivial(self):
        assert edr.ozawa(NS(1.0, 1.0, 1.0)).lhs == 3.0

    def test_saturation_point(self):
        v = edr.ozawa(NS(0.25, 1 / 9, 1.0))
        assert v.lhs == pytest.approx(1.0, abs=1e-15)
        assert abs(v.margin) < 1e-12 and v.satisfied

    def test_model_example(self):
        ns = model.normalized_point(model.DimensionlessParams(1.0, RHO, 0.02))
        v = edr.ozawa(ns)
        u, w = math.sqrt(ns.s_eps_t), math.sqrt(ns.s_eta_t)
        assert v.lhs == pytest.approx(u * w + u + w, rel=1e-15)
        assert v.lhs == pytest.approx(2.184051, abs=3e-6)


class TestBranciard:
    def test_straight_line(self):
        v = edr.branciard(NS(0.5, 0.5, 1.0))
        assert v.lhs == 1.0 and v.rhs == 1.0 and v.satisfied

    def test_model_example(self):
        v = edr.branciard(model.normalized_point(model.DimensionlessParams(1.0, RHO, 0.02)))
        assert v.lhs == pytest.approx(1.476107, abs=1e-6)

    def test_decoupled(self):
        v = edr.branciard(NS(1.0, 1.0, 0.0))
        assert (v.lhs, v.rhs) == (4.0, 0.0)

    def test_clamp_window(self):
        edr.branciard(NS(1.0, 1.0, 1.0 + 4e-13))
        with pytest.raises(edr.RobertsonViolation):
            edr.branciard(NS(1.0, 1.0, 1.0 + 1e-9))

    def test_vectorized_matches_scalar(self):
        s = np.array([0.1, 0.5, 2.0])
        t = np.array([0.3, 0.5, 0.01])
        vec = edr.branciard_lhs(s, t, 0.8)
        for a, b, lhs in zip(s, t, vec):
            assert edr.branciard(NS(a, b, 0.8)).lhs == pytest.approx(lhs, rel=1e-15)
        with pytest.raises(edr.RobertsonViolation):
            edr.branciard_lhs(s, t, 1.1)


class TestRobertson:
    def test_saturated(self):
        v = edr.robertson(NS(1.0, 1.0, 1.0))
        assert v.margin == 0.0 and v.satisfied

    def test_half(self):
        assert edr.robertson(NS(1.0, 1.0, 0.5)).satisfied

    def test_guard(self):
        assert not edr.robertson(NS(1.0, 1.0, 1.0 + 1e-9)).satisfied


class TestUnnormalized:
    @pytest.mark.parametrize("x", [0.3, 1.0, 2.5])
    def test_consistent_with_normalized(self, x):
        sp = model_point(x)
        ns = model.normalize(sp)
        scale = math.sqrt(sp.s_x0 * sp.s_p0)
        for un, norm, power in ((edr.spectral_ozawa_unnormalized, edr.ozawa, 1),
                                (edr.spectral_branciard_unnormalized, edr.branciard, 2)):
            a, b = un(sp), norm(ns)
            assert a.satisfied == b.satisfied
            assert a.margin / scale**power == pytest.approx(b.margin, rel=1e-12, abs=1e-12)

    def test_all_zero(self):
        sp = model.SpectralPoint(1.0, 0, 0, 0, 0, 0, 0, 0, 0.0)
        assert edr.spectral_ozawa_unnormalized(sp).margin == 0.0
        assert edr.spectral_branciard_unnormalized(sp).margin == 0.0

    def test_homogeneity(self):
        sp = model_point(1.3)
        base = [f(sp).satisfied for f in (edr.spectral_ozawa_unnormalized, edr.spectral_branciard_unnormalized)]
        for c in (1e-30, 1e-3, 7.0, 1e20):
            scaled = sp.scaled(c)
            assert [f(scaled).satisfied for f in (edr.spectral_ozawa_unnormalized,
                                                  edr.spectral_branciard_unnormalized)] == base

    def test_homogeneity_on_saturating_point(self):
        # the clamp window is relative; the satisfaction tolerance is absolute, so an
        # exactly saturated point stays saturated under down-scaling only
        s_x0, s_p0 = 3.0, 5.0
        sp = model.SpectralPoint(1.0, 0, 0, 0, s_x0, s_p0, 0.5 * s_x0, 0.5 * s_p0, math.sqrt(s_x0 * s_p0))
        for c in (1e-20, 1e-6, 1.0):
            v = edr.spectral_branciard_unnormalized(sp.scaled(c))
            assert v.satisfied
            assert abs(v.margin) <= 1e-12 * v.rhs

    def test_chi_zero_always_satisfied(self):
        sp = replace(model_point(0.7), chi=0.0)
        v = edr.spectral_branciard_unnormalized(sp)
        expected = (math.sqrt(sp.s_eps * sp.s_p0) + math.sqrt(sp.s_x0 * sp.s_eta)) ** 2
        assert v.lhs == pytest.approx(expected, rel=1e-12)
        assert v.satisfied

    def test_saturating_pair_rescaled(self):
        s_x0, s_p0 = 2.0e-3, 7.0e4
        sp = model.SpectralPoint(1.0, 0, 0, 0, s_x0, s_p0, 0.3 * s_x0, 0.7 * s_p0, math.sqrt(s_x0 * s_p0))
        v = edr.spectral_branciard_unnormalized(sp)
        assert abs(v.margin) <= 1e-12 * v.rhs

    def test_inconsistent_input_raises(self):
        sp = replace(model_point(), chi=1.1 * model_point().chi)
        with pytest.raises(edr.RobertsonViolation):
            edr.spectral_branciard_unnormalized(sp)


class TestBraginsky:
    @pytest.mark.parametrize("sigma", [1e-3, 0.02, 1.0])
    def test_coherent_probe_saturated(self, sigma):
        s_q0, s_f0, s_fq = model.probe_spectra(sigma)
        v = edr.braginsky_check(s_q0, s_f0, s_fq, -1.0)
        assert v.lhs == pytest.approx(1.0, abs=1e-12) and v.rhs == 1.0 and v.satisfied

    def test_trivial(self):
        assert edr.braginsky_check(2.0, 2.0, 0.0, -1.0).lhs == 4.0

    def test_override(self):
        v = edr.braginsky_check(1.25, 1.0, 0.5, -1.0)
        assert v.lhs == 1.0 and v.rhs == 1.0 and v.margin == 0.0

    def test_imaginary_term_kept(self):
        # complex chi enters through the Im[chi S_BA] term
        v = edr.braginsky_check(2.0, 2.0, 0.5, 1j)
        assert v.rhs == pytest.approx(1.0 + 2 * 0.5)

    def test_negative_spectrum(self):
        with pytest.raises(ValueError):
            edr.braginsky_check(-1.0, 1.0, 0.0, -1.0)


class TestCorrelatedBound:
    def test_values(self):
        assert edr.correlated_bound(0, 0) == pytest.approx(math.sqrt(2), rel=1e-15)
        assert edr.correlated_bound(1, 0) == pytest.approx(math.sqrt(4 - math.sqrt(2)), rel=1e-15)
        assert edr.correlated_bound(1, 0) == pytest.approx(1.608038, abs=1e-6)
        assert edr.correlated_bound(0, 1) == edr.correlated_bound(1, 0)

    def test_floor_on_grid(self):
        a, b = np.meshgrid(np.linspace(-3, 3, 61), np.linspace(-3, 3, 61))
        bound = edr.correlated_bound(a, b)
        assert np.all(bound >= math.sqrt(2))
        at_floor = np.isclose(bound, math.sqrt(2), rtol=0, atol=1e-15)
        assert at_floor.sum() == 1 and a[at_floor][0] == 0 and b[at_floor][0] == 0

    def test_sweep_bound_small(self):
        # brute-force check at ρ=0.3 on a coarse version of the acceptance grid
        sopt = closed_form_sigma_opt(RHO)
        for sigma in (sopt / 10, sopt, 10 * sopt):
            for a in (-2.0, -0.5, 0.0, 1.0):
                for x in (0.2, 0.9, 1.0, 2.7):
                    sp = model.error_disturbance_spectra(model.DimensionlessParams(x, RHO, sigma), a)
                    ns = model.normalize(sp)
                    r = model.response_xx(x, RHO)
                    v = edr.correlated_verdict(ns.s_eps_t, ns.s_eta_t, a, r.real / r.imag)
                    assert v.margin >= -1e-10


class TestBoundaries:
    def test_examples(self):
        assert edr.boundary_values("ozawa", 0.25) == pytest.approx(1 / 9, rel=1e-15)
        assert edr.boundary_values("branciard", 0.5) == 0.5
        assert edr.boundary_values("heisenberg", 2.0) == 0.5

    def test_ozawa_matches_brute_root(self):
        from scipy.optimize import brentq

        for s in (0.01, 0.25, 0.6, 0.95):
            root = brentq(lambda v: edr.ozawa(NS(s, v, 1.0)).margin, 0.0, 1.0, xtol=1e-15)
            assert edr.boundary_values("ozawa", s) == pytest.approx(root, abs=1e-12)

    def test_undefined_region(self):
        assert np.isnan(edr.boundary_values("ozawa", 2.0))
        assert np.isnan(edr.boundary_values("branciard", 1.5))
        assert len(edr.saturation_boundary("branciard", [0.5, 2.0]).points) == 1

    @pytest.mark.parametrize("kind", edr.BOUNDARY_KINDS)
    def test_points_saturate(self, kind):
        curve = edr.saturation_boundary(kind, edr.default_boundary_grid())
        assert curve.kind == kind and curve.points
        for s, v in curve.points:
            assert abs(edr.VERDICTS[kind](NS(s, v, 1.0)).margin) < 1e-12

    def test_errors(self):
        with pytest.raises(ValueError):
            edr.saturation_boundary("robertson", [0.5])
        with pytest.raises(ValueError):
            edr.saturation_boundary("ozawa", [0.0, 0.5])


@settings(max_examples=200)
@given(pos, pos)
def test_branciard_implies_ozawa(s, t):
    ns = NS(s, t, 1.0)
    if edr.branciard(ns).satisfied:
        assert edr.ozawa(ns).satisfied


def test_hierarchy_bulk():
    rng = np.random.default_rng(7)
    s, t = rng.uniform(1e-3, 10, (2, 100_000))
    branciard_ok = edr.branciard_lhs(s, t) >= 1 - edr.TOL
    ozawa_ok = edr.ozawa_lhs(s, t) >= 1 - edr.TOL
    assert np.all(ozawa_ok[branciard_ok])


@settings(max_examples=200)
@given(st.floats(min_value=1e-3, max_value=10), st.floats(min_value=0.01, max_value=3),
       st.floats(min_value=1e-4, max_value=10))
def test_model_points_always_valid(x, rho, sigma):
    sp = model.error_disturbance_spectra(model.DimensionlessParams(x, rho, sigma))
    ns = model.normalize(sp)
    for verdict in (edr.ozawa(ns), edr.branciard(ns), edr.robertson(ns),
                    edr.spectral_ozawa_unnormalized(sp), edr.spectral_branciard_unnormalized(sp)):
        assert verdict.margin >= -1e-12
