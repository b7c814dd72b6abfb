"""Unit-circle response, supremum search and closed-form regions."""

import cmath
import math

import numpy as np
import pytest

from ilcmap.learning import (LearningKind, UnsupportedKindError,
                             named_learning, parse_taps)
from ilcmap.plant import ABPoint, PlantParams, ab_from_plant
from ilcmap.zdomain import (EPS_BAND, PoleError, T_of_theta,
                            ac_region_analytic, analytic_curves,
                            closed_loop_P, mc_region_analytic, sup_T)

LN2 = math.log(2.0)


def direct_closed_loop(z, u, kp, ki, tau_s):
    """Independent transcription of G/(1 + C G) for cross-checking."""
    g = (math.exp(u) - 1.0) / (z * math.exp(u) - 1.0)
    c = kp + ki * tau_s * z / (z - 1.0)
    return g / (1.0 + c * g)


class TestClosedLoop:
    def test_dc_value_equals_loop_gain(self):
        p = PlantParams(u_product=LN2, kp=1.0)
        val = closed_loop_P(1.0, p)
        assert val == pytest.approx(0.5, abs=1e-14)
        assert val == pytest.approx(1.0 / (1.0 + p.kp), abs=1e-14)

    def test_one_pole_form(self):
        p = PlantParams(u_product=LN2, kp=1.0)
        pt = ab_from_plant(p)
        for z in (2.0, -1.5, 0.7 + 0.9j):
            expected = pt.a_gain / (z - pt.b_pole)
            assert closed_loop_P(z, p) == pytest.approx(expected, abs=1e-12)
        assert closed_loop_P(2.0, p) == pytest.approx(0.25, abs=1e-14)

    def test_pi_controller_against_direct_formula(self):
        # pole-zero cancellation choice: ki = a*kp with a = u/tau_s
        u, tau_s, kp = 0.8, 0.5, 0.7
        ki = (u / tau_s) * kp
        p = PlantParams(u_product=u, kp=kp, ki=ki, sample_period=tau_s)
        rng = np.random.default_rng(12)
        for theta in rng.uniform(0.05, math.pi - 0.05, size=10):
            z = cmath.exp(1j * theta)
            assert closed_loop_P(z, p) == pytest.approx(
                direct_closed_loop(z, u, kp, ki, tau_s), abs=1e-12)

    def test_pole_raises(self):
        p = PlantParams(u_product=LN2, kp=1.0)
        pole = ab_from_plant(p).b_pole
        with pytest.raises(PoleError):
            closed_loop_P(pole, p)
        with pytest.raises(PoleError):
            closed_loop_P(1.0, PlantParams(u_product=1.0, kp=0.5, ki=0.4))


class TestTOfTheta:
    def test_dc_identity_filter(self):
        val = T_of_theta(ABPoint(0.5, 0.0), named_learning(LearningKind.L1), 0.0)
        assert val == pytest.approx(0.5, abs=1e-14)

    def test_look_ahead_nyquist_touch(self):
        val = T_of_theta(ABPoint(0.5, 0.0),
                         named_learning(LearningKind.L2_AHEAD), math.pi)
        assert abs(val - 1.0) < 1e-12

    def test_zero_gain_is_identity(self):
        lf = named_learning(LearningKind.L3_SYMMETRIC, gain_v=0.0)
        assert T_of_theta(ABPoint(0.7, -0.4), lf, 1.234) == 1.0

    def test_dc_is_real(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            pt = ABPoint(rng.uniform(0.05, 0.95), rng.uniform(-0.9, 0.9))
            lf = parse_taps("0:1,1:0.3,-2:0.4", gain_v=rng.uniform(0.1, 3.0))
            assert T_of_theta(pt, lf, 0.0).imag == 0.0

    def test_conjugate_symmetry(self):
        rng = np.random.default_rng(4)
        lf = named_learning(LearningKind.L3_AHEAD, 1.3)
        for _ in range(20):
            pt = ABPoint(rng.uniform(0.05, 0.95), rng.uniform(-0.9, 0.9))
            theta = rng.uniform(0.0, math.pi)
            v1 = T_of_theta(pt, lf, theta)
            v2 = T_of_theta(pt, lf, 2.0 * math.pi - theta)
            assert abs(v1) == pytest.approx(abs(v2), abs=1e-12)
            assert v2 == pytest.approx(v1.conjugate(), abs=1e-12)

    def test_pole_on_circle(self):
        with pytest.raises(PoleError):
            T_of_theta(ABPoint(0.5, 1.0), named_learning(LearningKind.L1), 0.0)


class TestSupT:
    def test_identity_filter_closed_form(self):
        # endpoint evaluation max(|1 - Av/(1-B)|, |1 - Av/(1+B)|) across
        # the full 21x21 interior grid
        rng = np.random.default_rng(9)
        for a in np.linspace(0.05, 0.95, 21):
            for b in np.linspace(-0.9, 0.9, 21):
                v = rng.uniform(0.25, 3.0)
                locus = sup_T(ABPoint(a, b),
                              named_learning(LearningKind.L1, v))
                expected = max(abs(1 - a * v / (1 - b)),
                               abs(1 - a * v / (1 + b)))
                assert locus.sup_abs == pytest.approx(expected, abs=1e-9)

    def test_look_back_closed_form(self):
        # |T| is monotone in cos(theta): supremum = max(|T(0)|, |T(pi)|),
        # and T(pi) = 1 exactly (structural touch)
        lf1 = named_learning(LearningKind.L2_BACK, 1.0)
        for a in np.linspace(0.05, 0.95, 21):
            for b in np.linspace(-0.9, 0.9, 21):
                locus = sup_T(ABPoint(a, b), lf1)
                t0 = abs(1.0 - 2.0 * a / (1.0 - b))
                assert locus.sup_abs == pytest.approx(max(t0, 1.0), abs=1e-9)
                assert locus.touch_phases == pytest.approx((math.pi,),
                                                           abs=1e-9)

    def test_strict_sup_discounts_touch(self):
        locus = sup_T(ABPoint(0.5, 0.3), named_learning(LearningKind.L2_BACK))
        assert locus.sup_abs == pytest.approx(1.0, abs=1e-12)
        assert locus.sup_strict == pytest.approx(abs(1 - 1.0 / 0.7), abs=1e-4)
        assert locus.sup_strict < 1.0 - EPS_BAND

    def test_flat_locus(self):
        # B = 0 with the identity filter: |T| is constant over theta
        locus = sup_T(ABPoint(0.5, 0.0), named_learning(LearningKind.L1))
        assert locus.sup_abs == pytest.approx(0.5, abs=1e-12)
        assert np.allclose(np.abs(locus.values), 0.5, atol=1e-12)

    def test_boundary_gain(self):
        # Av = 2 at B = 0: T(0) = -1, exactly on the unit circle
        locus = sup_T(ABPoint(0.5, 0.0), named_learning(LearningKind.L1, 4.0))
        assert locus.sup_abs == pytest.approx(1.0, abs=1e-9)

    def test_symmetric_filter_exceeds_one(self):
        locus = sup_T(ABPoint(0.3, 0.5),
                      named_learning(LearningKind.L3_SYMMETRIC))
        assert locus.sup_strict > 1.0

    def test_zero_gain_marginal(self):
        locus = sup_T(ABPoint(0.4, -0.2), named_learning(LearningKind.L1, 0.0))
        assert locus.sup_abs == 1.0
        assert locus.sup_strict == 1.0

    def test_grid_contract(self):
        locus = sup_T(ABPoint(0.4, 0.1), named_learning(LearningKind.L1),
                      grid_size=64)
        assert locus.thetas[0] == 0.0
        assert locus.thetas[-1] == pytest.approx(math.pi)
        assert np.all(np.diff(locus.thetas) > 0)
        assert locus.sup_abs >= np.abs(locus.values).max() - 1e-12
        with pytest.raises(ValueError):
            sup_T(ABPoint(0.4, 0.1), named_learning(LearningKind.L1),
                  grid_size=32)
        with pytest.raises(PoleError):
            sup_T(ABPoint(0.4, 1.0), named_learning(LearningKind.L1))


class TestAnalyticRegions:
    def test_identity_filter_inside(self):
        v = mc_region_analytic(LearningKind.L1, ABPoint(0.5, 0.5), 1.0)
        assert v.mc and not v.marginal

    def test_look_ahead_outside(self):
        v = mc_region_analytic(LearningKind.L2_AHEAD, ABPoint(0.5, 0.6), 1.0)
        assert not v.mc
        assert "B <= 1 - Av" in v.detail

    def test_symmetric_never(self):
        rng = np.random.default_rng(13)
        for _ in range(10):
            pt = ABPoint(rng.uniform(0.05, 0.95), rng.uniform(-0.9, 0.9))
            v = mc_region_analytic(LearningKind.L3_SYMMETRIC, pt,
                                   rng.uniform(0.2, 3.0))
            assert not v.mc

    def test_three_term_qualifier(self):
        v = mc_region_analytic(LearningKind.L3_AHEAD, ABPoint(0.3, 0.6), 1.0)
        assert v.qualifier == "necessary-only"
        v = mc_region_analytic(LearningKind.L3_BACK, ABPoint(0.3, -0.5), 1.0)
        assert v.qualifier == "necessary-only"
        assert v.mc  # -0.583 < -0.5 < -0.464 at A = 0.3... printed band

    def test_unsupported_kinds(self):
        for kind in (LearningKind.CUSTOM, LearningKind.L3_SYMMETRIC_HALF):
            with pytest.raises(UnsupportedKindError, match="sup_T"):
                mc_region_analytic(kind, ABPoint(0.5, 0.0), 1.0)

    def test_marginal_on_boundary(self):
        # exactly on B = 1 - Av/2
        v = mc_region_analytic(LearningKind.L1, ABPoint(0.5, 0.75), 1.0)
        assert v.marginal

    def test_ac_causal_entire_rectangle(self):
        v = ac_region_analytic(LearningKind.L1, ABPoint(0.5, 0.9), 1.0)
        assert v.mc
        v = ac_region_analytic(LearningKind.L2_BACK, ABPoint(0.999, -0.9), 1.0)
        assert v.mc
        # gain pushes 1 - vA out of the unit disk
        v = ac_region_analytic(LearningKind.L3_BACK, ABPoint(0.5, 0.0), 5.0)
        assert not v.mc

    def test_ac_look_ahead_strip(self):
        ac = ac_region_analytic(LearningKind.L2_AHEAD, ABPoint(0.5, 0.55), 1.0)
        mc = mc_region_analytic(LearningKind.L2_AHEAD, ABPoint(0.5, 0.55), 1.0)
        assert ac.mc and ac.qualifier == "empirical-fit"
        assert not mc.mc
        ac = ac_region_analytic(LearningKind.L2_AHEAD, ABPoint(0.5, 0.6), 1.0)
        assert not ac.mc  # 0.6 > (1.5)^2 / 4 = 0.5625

    def test_ac_fit_requires_unit_gain(self):
        with pytest.raises(UnsupportedKindError, match="v = 1"):
            ac_region_analytic(LearningKind.L2_AHEAD, ABPoint(0.5, 0.0), 2.0)
        with pytest.raises(UnsupportedKindError):
            ac_region_analytic(LearningKind.L3_SYMMETRIC, ABPoint(0.5, 0.0),
                               1.0)


class TestRegionCrossChecks:
    def _sup_tri(self, pt, lf):
        locus = sup_T(pt, lf)
        if locus.sup_abs > 1.0 + EPS_BAND:
            return False
        if locus.sup_strict < 1.0 - EPS_BAND:
            return True
        return None  # marginal

    @pytest.mark.parametrize("kind,v", [
        (LearningKind.L1, 1.0), (LearningKind.L2_BACK, 1.0),
        (LearningKind.L2_AHEAD, 1.0),
    ])
    def test_supremum_matches_closed_form(self, kind, v):
        lf = named_learning(kind, v)
        for a in np.linspace(0.08, 0.92, 11):
            for b in np.linspace(-0.88, 0.88, 11):
                verdict = mc_region_analytic(kind, ABPoint(a, b), v)
                margins_ok = not verdict.marginal
                if not margins_ok:
                    continue
                # skip points closer than 1e-3 to the region edge
                if _edge_distance(kind, a, b, v) <= 1e-3:
                    continue
                tri = self._sup_tri(ABPoint(a, b), lf)
                assert tri is not None
                assert tri == verdict.mc, (kind, a, b)

    @pytest.mark.parametrize("kind", [LearningKind.L3_AHEAD,
                                      LearningKind.L3_BACK])
    def test_three_term_necessary_direction(self, kind):
        # wherever the supremum verdict is confidently true, the printed
        # conditions must hold as well
        lf = named_learning(kind, 1.0)
        for a in np.linspace(0.08, 0.92, 9):
            for b in np.linspace(-0.88, 0.88, 9):
                tri = self._sup_tri(ABPoint(a, b), lf)
                if tri is True:
                    assert mc_region_analytic(kind, ABPoint(a, b), 1.0).mc


def _edge_distance(kind, a, b, v):
    """Distance in B to the closed-form region edge (conservative)."""
    av = a * v
    if kind is LearningKind.L1:
        return min(abs(b - (1 - av / 2)), abs(b - (-1 + av / 2)))
    if kind is LearningKind.L2_BACK:
        return min(abs(b - (1 - av)), abs(b + 1))
    if kind is LearningKind.L2_AHEAD:
        return min(abs(b - (1 - av)), abs(b - (av - 1) / 3), abs(av - 1))
    raise AssertionError(kind)


def test_analytic_curves():
    curves = dict(analytic_curves(LearningKind.L1, 1.0))
    assert curves["mc-upper"](0.5) == pytest.approx(0.75)
    assert curves["mc-lower"](0.5) == pytest.approx(-0.75)
    curves = dict(analytic_curves(LearningKind.L2_AHEAD, 1.0))
    assert curves["ac-upper"](0.5) == pytest.approx(0.5625)
    assert curves["ac-lower"](0.5) == pytest.approx(-0.375)
    with pytest.raises(UnsupportedKindError):
        analytic_curves(LearningKind.L3_SYMMETRIC, 1.0)
