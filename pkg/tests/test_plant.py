"""Plant transform, gain limits and within-trial simulation."""

import math

import numpy as np
import pytest

from ilcmap.plant import (ABPoint, PlantParams, ab_from_plant, classify_gain,
                          classify_pole, is_divergent, no_ilc_gain_limits,
                          plant_from_ab, simulate_trial)

LN2 = math.log(2.0)


class TestABTransform:
    def test_half_life_unit_gain(self):
        pt = ab_from_plant(PlantParams(u_product=LN2, kp=1.0))
        assert pt.a_gain == pytest.approx(0.5, abs=1e-15)
        assert pt.b_pole == pytest.approx(0.0, abs=1e-15)

    def test_half_life_zero_gain(self):
        pt = ab_from_plant(PlantParams(u_product=LN2, kp=0.0))
        assert pt.a_gain == pytest.approx(0.5, abs=1e-15)
        assert pt.b_pole == pytest.approx(0.5, abs=1e-15)

    def test_small_u_limit(self):
        pt = ab_from_plant(PlantParams(u_product=1e-9, kp=0.0))
        assert pt.a_gain < 1e-8
        assert pt.b_pole > 1.0 - 1e-8

    def test_rejects_integral_gain(self):
        with pytest.raises(ValueError, match="ki"):
            ab_from_plant(PlantParams(u_product=1.0, kp=0.5, ki=0.2))

    def test_rejects_nonpositive_u(self):
        with pytest.raises(ValueError):
            PlantParams(u_product=0.0, kp=0.5)
        with pytest.raises(ValueError):
            PlantParams(u_product=-1.0, kp=0.5)

    def test_inverse_examples(self):
        p = plant_from_ab(ABPoint(0.5, 0.0))
        assert p.u_product == pytest.approx(LN2, rel=1e-14)
        assert p.kp == pytest.approx(1.0, rel=1e-14)
        p = plant_from_ab(ABPoint(0.5, 0.5))
        assert p.kp == pytest.approx(0.0, abs=1e-14)

    def test_inverse_near_a_one(self):
        p = plant_from_ab(ABPoint(1.0 - 1e-12, 0.0))
        assert p.u_product > 20.0
        assert abs(p.kp) < 1e-9

    def test_inverse_rejects_out_of_range(self):
        for a in (0.0, 1.0, -0.2, 1.3):
            with pytest.raises(ValueError):
                plant_from_ab(ABPoint(a, 0.0))

    def test_round_trip(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            u = rng.uniform(0.01, 5.0)
            kp_hi = 1.0 / (math.exp(u) - 1.0)
            kp = rng.uniform(-0.999, kp_hi)
            src = PlantParams(u_product=u, kp=kp)
            back = plant_from_ab(ab_from_plant(src))
            assert back.u_product == pytest.approx(u, rel=1e-12)
            assert back.kp == pytest.approx(kp, rel=1e-12, abs=1e-12)


class TestGainLimits:
    def test_half_life_bounds(self):
        lim = no_ilc_gain_limits(LN2)
        assert lim.kp_limit_divergence == pytest.approx(3.0, rel=1e-14)
        assert lim.kp_limit_oscillation == pytest.approx(1.0, rel=1e-14)
        assert lim.kp_floor == -1.0
        assert lim.stable_interval == (-1.0, lim.kp_limit_divergence)

    def test_large_u_limits(self):
        lim = no_ilc_gain_limits(40.0)
        assert lim.kp_limit_divergence == pytest.approx(1.0, abs=1e-9)
        assert lim.kp_limit_oscillation == pytest.approx(0.0, abs=1e-9)

    def test_second_bound_below_first(self):
        rng = np.random.default_rng(3)
        for u in rng.uniform(0.01, 8.0, size=100):
            lim = no_ilc_gain_limits(float(u))
            assert lim.kp_limit_oscillation < lim.kp_limit_divergence

    def test_oscillatory_but_stable_gain(self):
        # violates only the monotone-response bound
        pt = ab_from_plant(PlantParams(u_product=LN2, kp=2.0))
        assert pt.b_pole == pytest.approx(-0.5, abs=1e-14)
        assert classify_gain(LN2, 2.0) == "stable, oscillatory"

    def test_rejects_bad_u(self):
        with pytest.raises(ValueError):
            no_ilc_gain_limits(0.0)


class TestSimulateTrial:
    def test_pole_at_origin_settles_in_one_step(self):
        resp = simulate_trial(ABPoint(0.5, 0.0), reference=1.0, steps=3)
        assert np.allclose(resp.samples, [0.0, 0.5, 0.5, 0.5], atol=0)
        assert resp.classification == "monotone"

    def test_geometric_series_closed_form(self):
        a, b, r = 0.5, 0.5, 1.0
        resp = simulate_trial(ABPoint(a, b), reference=r, steps=12)
        ks = np.arange(13)
        expected = a * r * (1.0 - b ** ks) / (1.0 - b)
        assert np.allclose(resp.samples, expected, atol=1e-14)
        assert resp.samples[:4] == pytest.approx([0.0, 0.5, 0.75, 0.875])
        assert resp.classification == "monotone"

    def test_alternating_growth(self):
        resp = simulate_trial(ABPoint(0.5, -1.2), reference=1.0, steps=30)
        assert resp.classification == "growing-oscillation"
        tail = resp.samples[-6:]
        assert np.all(np.sign(tail[1:]) == -np.sign(tail[:-1]))
        assert abs(resp.samples[-1]) > abs(resp.samples[-3])

    def test_steady_state(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            a = rng.uniform(0.05, 0.95)
            b = rng.uniform(-0.9, 0.9)
            r = rng.uniform(0.5, 2.0)
            resp = simulate_trial(ABPoint(a, b), reference=r, steps=2000)
            assert resp.samples[-1] == pytest.approx(a * r / (1 - b), abs=1e-9)

    def test_steady_state_matches_loop_gain(self):
        rng = np.random.default_rng(6)
        for _ in range(30):
            u = rng.uniform(0.1, 3.0)
            kp = rng.uniform(-0.9, 1.0 / (math.exp(u) - 1.0))
            pt = ab_from_plant(PlantParams(u_product=u, kp=kp))
            resp = simulate_trial(pt, reference=1.0, steps=3000)
            assert resp.samples[-1] == pytest.approx(1.0 / (1.0 + kp),
                                                     abs=1e-9)

    def test_divergence_iff_pole_outside_unit_interval(self):
        rng = np.random.default_rng(8)
        for b in rng.uniform(-2.0, 2.0, size=200):
            cls = classify_pole(float(b))
            assert is_divergent(cls) == (abs(b) > 1.0)

    def test_marginal_poles(self):
        assert classify_pole(1.0) == "marginal"
        assert classify_pole(-1.0) == "marginal"

    def test_sample_count_and_start(self):
        resp = simulate_trial(ABPoint(0.3, 0.2), steps=7)
        assert len(resp.samples) == 8
        assert resp.samples[0] == 0.0

    def test_rejects_zero_steps(self):
        with pytest.raises(ValueError):
            simulate_trial(ABPoint(0.3, 0.2), steps=0)
