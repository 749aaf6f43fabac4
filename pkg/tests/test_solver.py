import math
import warnings
from dataclasses import replace

import numpy as np
import pytest

import kppfront as kf
from kppfront.solver import ValidationError, make_initial

from oracle_values import C_STAR


def zero_data(h0):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return make_initial(h0, lambda x: np.zeros_like(x), "zero")


class TestNonlinearity:
    def test_logistic_caps(self):
        f = kf.logistic()
        assert f.lipschitz_cap(1.0) == 1.0
        assert f.lipschitz_cap(2.0) == 3.0

    def test_rejects_shifted_zero(self):
        bad = kf.Nonlinearity(
            name="bad", f=lambda u: u * (1.2 - u), fprime=lambda u: 1.2 - 2 * u, fprime_at_1=-0.8
        )
        with pytest.raises(ValidationError):
            kf.ProblemSpec(c=0.5, mu=1.0, h0=1.0, f=bad)


class TestInitialData:
    def test_sine_is_admissible(self):
        data = kf.initial_sine(2.0, 0.5)
        assert data.in_X_class
        assert data.sup == pytest.approx(0.5, abs=1e-12)

    def test_nonzero_boundary_rejected(self):
        with pytest.raises(ValidationError):
            make_initial(1.0, lambda x: x, "ramp")

    def test_negative_data_rejected(self):
        with pytest.raises(ValidationError):
            make_initial(1.0, lambda x: -np.sin(np.pi * x), "negative")

    def test_outside_class_warns_but_loads(self):
        with pytest.warns(UserWarning, match="outside the admissible class"):
            data = make_initial(
                1.0, lambda x: np.sin(np.pi * np.clip(x * 2 - 0.5, 0, 1)), "offset-bump"
            )
        assert not data.in_X_class
        assert data.violations

    def test_custom_round_trips_samples(self):
        xs = np.linspace(0.0, 2.0, 257)
        us = np.sin(np.pi * xs / 2.0) * 0.3
        data = kf.initial_custom(xs, us)
        assert np.allclose(data.evaluate(xs), us, atol=1e-12)


class TestInitState:
    def test_sine_sampled_exactly(self):
        spec = kf.ProblemSpec(c=0.5, mu=1.0, h0=2.0)
        state = kf.init_state(spec, kf.initial_sine(2.0, 0.7), N=64)
        j = np.arange(65)
        assert np.allclose(state.v, 0.7 * np.sin(np.pi * j / 64), atol=1e-15)
        assert state.H == 2.0 and state.t == 0.0

    def test_compact_wave_state_width(self, wave_inv_mu2):
        wave = wave_inv_mu2
        spec = kf.ProblemSpec(c=wave.c, mu=wave.mu, h0=wave.L)
        state = kf.init_state(spec, kf.initial_compact_wave(wave), N=400)
        assert state.H == wave.L
        assert state.v[0] == 0.0 and state.v[-1] == 0.0

    def test_h0_mismatch_rejected(self):
        spec = kf.ProblemSpec(c=0.5, mu=1.0, h0=2.0)
        with pytest.raises(ValidationError):
            kf.init_state(spec, kf.initial_sine(1.0, 0.5), N=64)

    def test_small_grid_rejected(self):
        spec = kf.ProblemSpec(c=0.5, mu=1.0, h0=2.0)
        with pytest.raises(ValidationError):
            kf.init_state(spec, kf.initial_sine(2.0, 0.5), N=8)


class TestBoundaryFlux:
    def test_exact_for_linear_profile(self):
        for N in (16, 50, 400):
            state = kf.FrontFixedState(0.0, 1.0, np.linspace(1.0, 0.0, N + 1), 0.0)
            assert kf.boundary_flux(state) == pytest.approx(-1.0, abs=1e-12)

    def test_zero_profile(self):
        state = kf.FrontFixedState(0.0, 1.0, np.zeros(33), 0.0)
        assert kf.boundary_flux(state) == 0.0

    def test_sine_second_order(self):
        errs = []
        for N in (64, 128, 256):
            v = np.sin(np.pi * np.linspace(0.0, 1.0, N + 1))
            v[0] = v[-1] = 0.0
            state = kf.FrontFixedState(0.0, 1.0, v, 0.0)
            errs.append(abs(kf.boundary_flux(state) + math.pi))
        orders = [math.log2(errs[i] / errs[i + 1]) for i in range(2)]
        assert min(orders) >= 1.9


class TestStep:
    def test_one_step_preserves_traveling_wave(self, wave_inv_mu2):
        wave = wave_inv_mu2
        spec = kf.ProblemSpec(c=wave.c, mu=wave.mu, h0=wave.L)
        state = kf.init_state(spec, kf.initial_compact_wave(wave), N=400)
        new = kf.step(state, spec, 1e-4)
        assert abs(new.H - wave.L) <= 1e-6 * wave.L
        assert new.t == pytest.approx(1e-4)

    def test_zero_solution_decays_linearly(self):
        spec = kf.ProblemSpec(c=0.5, mu=1.0, h0=1.0)
        state = kf.init_state(spec, zero_data(1.0), N=64)
        for _ in range(5):
            state = kf.step(state, spec, 0.01)
        assert np.all(state.v == 0.0)
        assert state.H == pytest.approx(1.0 - 0.5 * state.t, abs=1e-14)

    def test_rejects_nonpositive_dt(self):
        spec = kf.ProblemSpec(c=0.5, mu=1.0, h0=1.0)
        state = kf.init_state(spec, kf.initial_sine(1.0, 0.5), N=64)
        with pytest.raises(ValidationError):
            kf.step(state, spec, 0.0)


class TestSimulate:
    def test_traveling_wave_invariance(self, wave_inv_mu2):
        wave = wave_inv_mu2
        spec = kf.ProblemSpec(c=wave.c, mu=wave.mu, h0=wave.L)
        controls = kf.SimControls(N=400, T_max=20.0 / wave.c)
        trace = kf.simulate(spec, kf.initial_compact_wave(wave), controls)
        assert trace.terminal == "horizon-reached"
        assert np.max(np.abs(trace.H - wave.L)) <= 1e-3 * wave.L

    def test_zero_data_floor_hit_time(self):
        spec = kf.ProblemSpec(c=0.5, mu=1.0, h0=1.0)
        controls = kf.SimControls(N=64, T_max=10.0)
        trace = kf.simulate(spec, zero_data(1.0), controls)
        assert trace.terminal == "floor-hit"
        floor = controls.floor_for(1.0)
        assert trace.t[-1] == pytest.approx((1.0 - floor) / 0.5, abs=1e-6)
        assert np.all(trace.umax == 0.0)

    def test_supnorm_never_exceeds_initial_cap(self):
        spec = kf.ProblemSpec(c=0.2, mu=1.0, h0=4.0)
        trace = kf.simulate(spec, kf.initial_sine(4.0, 1.3), kf.SimControls(N=200, T_max=40.0))
        assert np.max(trace.umax) <= 1.3 + 1e-8
        # eventual bound: close to 1 after the transient
        late = trace.umax[trace.t >= 20.0]
        assert np.max(late) <= 1.05

    def test_snapshots_land_on_requested_times(self):
        spec = kf.ProblemSpec(c=0.3, mu=1.0, h0=2.0)
        controls = kf.SimControls(N=64, T_max=3.0, snapshot_times=(1.0, 2.0, 3.0))
        trace = kf.simulate(spec, kf.initial_sine(2.0, 0.5), controls)
        assert [s.t for s in trace.snapshots] == [1.0, 2.0, 3.0]

    def test_monotone_front_and_speed_cap(self, wave_inv_mu2):
        wave = wave_inv_mu2
        spec = kf.ProblemSpec(c=wave.c, mu=wave.mu, h0=wave.L)
        data = kf.initial_compact_wave(wave)
        trace = kf.simulate(spec, data, kf.SimControls(N=200, T_max=10.0))
        monitor = kf.BoundMonitor.from_data(spec, data)
        hp = spec.c + trace.Hdot
        assert np.all(hp > 0.0)
        assert np.all(hp <= spec.mu * monitor.C2 + 1e-6)


class TestComparison:
    def test_nested_data_stay_ordered(self):
        # horizon kept short of the collapse so the fixed-dt grids coincide
        # (floor-approach halving would desynchronize the step sequences)
        c = 0.5 * C_STAR[1.0]
        spec = kf.ProblemSpec(c=c, mu=1.0, h0=2.0)
        snaps = tuple(np.arange(1.0, 8.5, 1.0))
        controls = kf.SimControls(N=128, T_max=8.0, dt_fixed=2e-3, snapshot_times=snaps)
        tr_low = kf.simulate(spec, kf.initial_sine(2.0, 0.3), controls)
        tr_high = kf.simulate(spec, kf.initial_sine(2.0, 0.5), controls)
        assert len(tr_low) == len(tr_high)
        assert np.all(tr_low.t == tr_high.t)
        assert np.max(tr_low.H - tr_high.H) <= 1e-8
        for s_low, s_high in zip(tr_low.snapshots, tr_high.snapshots):
            x = c * s_low.t + s_low.y * s_low.H
            diff = s_low.v - kf.to_physical(s_high, x, c)
            assert np.max(diff) <= 1e-6


class TestToPhysical:
    def test_boundaries_and_outside(self):
        v = np.sin(np.pi * np.linspace(0, 1, 65))
        v[0] = v[-1] = 0.0
        state = kf.FrontFixedState(2.0, 1.5, v, 0.0)
        c = 0.4
        left = c * state.t
        assert kf.to_physical(state, left, c) == 0.0
        assert kf.to_physical(state, left + state.H, c) == 0.0
        assert kf.to_physical(state, left - 1.0, c) == 0.0
        assert kf.to_physical(state, left + state.H + 1.0, c) == 0.0

    def test_grid_nodes_map_back(self):
        v = np.sin(np.pi * np.linspace(0, 1, 33))
        v[0] = v[-1] = 0.0
        state = kf.FrontFixedState(1.0, 2.0, v, 0.0)
        c = 0.25
        x = c * state.t + state.y * state.H
        assert np.allclose(kf.to_physical(state, x, c), v, atol=1e-14)


class TestSelfConvergence:
    def test_spatial_order_on_traveling_wave(self, wave_inv_mu2):
        wave = wave_inv_mu2
        spec = kf.ProblemSpec(c=wave.c, mu=wave.mu, h0=wave.L)
        data = kf.initial_compact_wave(wave)
        H_ends = []
        for k, N in enumerate((100, 200, 400)):
            controls = kf.SimControls(N=N, T_max=6.0, dt_max=0.02 / 4**k)
            H_ends.append(kf.simulate(spec, data, controls).H[-1])
        d1 = abs(H_ends[0] - H_ends[1])
        d2 = abs(H_ends[1] - H_ends[2])
        assert math.log2(d1 / d2) >= 1.8
