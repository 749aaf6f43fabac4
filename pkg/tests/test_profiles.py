import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import kppfront as kf
from kppfront.profiles import TabulatedProfile

from oracle_values import C_STAR, ELLIPTIC_MID, L_C, SEMI_WAVE_SLOPE


class TestSemiWaveSlope:
    def test_undamped_value_matches_first_integral(self):
        assert kf.semi_wave_slope(0.0) == pytest.approx(1.0 / math.sqrt(3.0), abs=1e-6)

    @pytest.mark.parametrize("c", [0.5, 1.0, 1.5])
    def test_matches_independent_oracle(self, c):
        assert kf.semi_wave_slope(c) == pytest.approx(SEMI_WAVE_SLOPE[c], abs=1e-6)

    def test_strictly_decreasing(self):
        vals = [kf.semi_wave_slope(c) for c in (0.0, 0.5, 1.0, 1.5)]
        assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_rejects_c_outside_range(self):
        with pytest.raises(ValueError):
            kf.semi_wave_slope(2.0)
        with pytest.raises(ValueError):
            kf.semi_wave_slope(-0.1)


class TestSolveSemiWave:
    def test_speed_matches_oracle(self, semi_wave_mu1):
        assert semi_wave_mu1.c_star == pytest.approx(C_STAR[1.0], abs=1e-6)

    def test_stefan_residual_within_tol(self, semi_wave_mu1):
        sw = semi_wave_mu1
        assert abs(sw.mu * abs(sw.slope0) - sw.c_star) <= sw.tol

    def test_ode_residual(self, semi_wave_mu1):
        assert semi_wave_mu1.residual() <= 1e-6

    def test_profile_shape(self, semi_wave_mu1):
        q = semi_wave_mu1.q
        assert q[-1] == 0.0
        assert np.all(np.diff(q) <= 0.0)  # strictly decreasing toward the front
        assert 1.0 - q[0] <= 1e-8  # plateau reached within tabulation tolerance
        assert np.all((q >= 0.0) & (q <= 1.0))

    def test_speeds_increase_with_mu_and_stay_below_two(self):
        speeds = [kf.solve_semi_wave(mu, tol=1e-8).c_star for mu in (0.5, 1.0, 2.0, 4.0, 8.0)]
        assert all(a < b for a, b in zip(speeds, speeds[1:]))
        assert all(s < 2.0 for s in speeds)
        for mu, s in zip((0.5, 1.0, 2.0, 4.0, 8.0), speeds):
            assert s == pytest.approx(C_STAR[mu], abs=1e-6)


class TestCompactWave:
    def test_small_c_support_length_matches_oracle(self):
        wave = kf.solve_compact_wave(0.05, 1.0, tol=1e-9)
        assert wave.L == pytest.approx(L_C[(0.05, 1.0)], abs=1e-7)

    def test_shoot_small_amplitude_matches_linearization(self):
        # at alpha = 1e-3 the orbit is nearly linear: zero spacing pi/sqrt(1 - c^2/4)
        c = 0.05
        L, beta, _ = kf.compact_wave_shoot(c, 1e-3)
        lin = math.pi / math.sqrt(1.0 - c * c / 4.0)
        assert abs(L - lin) / lin <= 0.02

    def test_shoot_amplitude_decay_matches_linearization(self):
        c = 0.2
        alpha = 1e-4
        L, beta, _ = kf.compact_wave_shoot(c, alpha)
        decay = math.exp(-0.5 * c * L)
        assert abs(beta / alpha + decay) / decay <= 0.05

    def test_shoot_no_return_for_large_alpha(self):
        # scan upward: the returning branch is bounded
        c = 0.3
        alpha = 1e-3
        saw_return = False
        for _ in range(40):
            out = kf.compact_wave_shoot(c, alpha)
            if out is None:
                assert saw_return
                return
            saw_return = True
            alpha *= 2.0
        pytest.fail("no NoReturn outcome found while scanning alpha upward")

    def test_invariants(self, wave_half_mu1):
        wave = wave_half_mu1
        assert wave.V[0] == 0.0 and wave.V[-1] == 0.0
        assert np.all(wave.V[1:-1] > 0.0)
        assert wave.V.max() < 1.0
        assert abs(wave.mu * abs(wave.slopeL) - wave.c) <= wave.tol
        assert wave.residual() <= 1e-6
        assert wave.L == pytest.approx(L_C[(wave.c, 1.0)], abs=1e-7)

    def test_no_wave_above_invasion_speed(self):
        with pytest.raises(kf.NoCompactWaveError):
            kf.solve_compact_wave(1.05 * C_STAR[1.0], 1.0, tol=1e-9)

    def test_support_length_continuous_in_c(self):
        # finite sup over a compact sub-interval of (0, c*), no grid-scale jumps
        c_star = C_STAR[1.0]
        cs = np.linspace(0.15 * c_star, 0.85 * c_star, 8)
        Ls = [kf.solve_compact_wave(c, 1.0, tol=1e-8).L for c in cs]
        assert all(np.isfinite(Ls))
        jumps = np.abs(np.diff(Ls))
        spacing = cs[1] - cs[0]
        # difference-quotient bound: slopes stay comparable along the sweep
        assert np.max(jumps) <= 10.0 * max(np.median(jumps), spacing)


class TestEllipticProfile:
    def test_wide_interval_plateau(self):
        prof = kf.elliptic_profile(0.0, 10.0, tol=1e-9)
        assert prof.profile.sample(0.0) >= 0.99
        assert prof.profile.sample(0.0) == pytest.approx(ELLIPTIC_MID[(0.0, 10.0)], abs=1e-6)

    def test_midpoint_increases_toward_one(self):
        mids = [kf.elliptic_profile(0.5, l, tol=1e-9).profile.sample(0.0) for l in (5.0, 10.0)]
        for (key, l), mid in zip([((0.5, 5.0), 5.0), ((0.5, 10.0), 10.0)], mids):
            assert mid == pytest.approx(ELLIPTIC_MID[key], abs=1e-5)
        assert mids[0] < mids[1] < 1.0

    def test_boundary_values_within_tol(self):
        tol = 1e-9
        prof = kf.elliptic_profile(0.5, 6.0, tol=tol)
        assert abs(prof.w[0]) <= tol
        assert abs(prof.w[-1]) <= tol
        assert prof.residual() <= 1e-6

    def test_existence_failure_for_short_interval(self):
        # below half the small-amplitude return length no positive solution exists
        with pytest.raises(kf.EllipticExistenceError):
            kf.elliptic_profile(0.0, 1.0, tol=1e-9)


class TestSampleProfile:
    def test_nodes_exact_and_outside_zero(self, wave_half_mu1):
        prof = wave_half_mu1.profile
        k = 700
        assert kf.sample_profile(prof, wave_half_mu1.z[k]) == wave_half_mu1.V[k]
        assert kf.sample_profile(prof, -0.5) == 0.0
        assert kf.sample_profile(prof, wave_half_mu1.L + 0.5) == 0.0

    def test_semi_wave_clamps_to_plateau_on_left(self, semi_wave_mu1):
        prof = semi_wave_mu1.profile
        assert kf.sample_profile(prof, semi_wave_mu1.z[0] - 50.0) == semi_wave_mu1.q[0]

    @settings(max_examples=200, deadline=None)
    @given(st.floats(min_value=0.0, max_value=1.0))
    def test_no_overshoot_between_nodes(self, frac):
        z = np.linspace(0.0, 1.0, 33)
        w = np.sin(np.pi * z) ** 2
        prof = TabulatedProfile(z, w)
        k = 13
        x = z[k] + frac * (z[k + 1] - z[k])
        val = prof.sample(x)
        lo, hi = min(w[k], w[k + 1]), max(w[k], w[k + 1])
        assert lo - 1e-12 <= val <= hi + 1e-12
