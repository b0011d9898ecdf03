import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from evcool.controllers import ConstantController
from evcool.cycles import CycleFile, synthetic_cycle
from evcool.simulate import (Mission, SimulationTrace, limit_violations, metrics,
                             run, scale_cycle)
from evcool.thermal import EnvironmentSample

from conftest import make_toy_model


def constant_mission(n, speed=40.0, ambient=33.0, solar=830.0, t0=40.0, q0=0.0):
    return Mission(times_s=np.arange(float(n)), speeds_kmh=np.full(n, speed),
                   ambient_c=np.full(n, ambient), solar_wm2=np.full(n, solar),
                   initial_temp_c=t0, initial_q_w=q0, name="const")


class TestRun:
    def test_zero_length_mission_empty_trace(self, model):
        trace = run(constant_mission(0), ConstantController(0.0), model)
        assert len(trace) == 0
        assert trace.total_energy_j == 0.0

    def test_trace_length_equals_mission_length(self, model):
        trace = run(constant_mission(25), ConstantController(2000.0), model)
        assert len(trace) == 25

    def test_fixed_capacity_follows_exponential(self, model):
        # RK4 path vs the closed-form affine-ODE solution over 100 s
        q = 5000.0
        mission = constant_mission(101, t0=40.0, q0=q)
        trace = run(mission, ConstantController(q), model)
        env = mission.env_sample(0)
        exact = model.exact_temperature(env, 40.0, q, trace.times_s)
        assert np.max(np.abs(trace.t_in_c - exact)) <= 1e-4

    def test_zero_cooling_with_positive_loads_heats_monotonically(self, model):
        mission = constant_mission(60, t0=25.0, q0=0.0)
        trace = run(mission, ConstantController(0.0), model)
        assert np.all(np.diff(trace.t_in_c) > 0)

    def test_cumulative_energy_nondecreasing_and_consistent(self, model):
        trace = run(constant_mission(50, t0=35.0, q0=0.0),
                    ConstantController(4000.0), model)
        assert np.all(np.diff(trace.cum_energy_j) >= 0)
        assert trace.cum_energy_j[-1] == pytest.approx(np.sum(trace.p_ac_w) * trace.dt_s)
        assert trace.total_energy_j == trace.cum_energy_j[-1]

    def test_requests_pass_through_clamp(self, model):
        # a controller requesting an instant jump gets rate-limited
        trace = run(constant_mission(30, q0=0.0), ConstantController(6800.0), model)
        assert limit_violations(trace, model) == 0
        assert trace.q_cool_w[0] == pytest.approx(500.0)

    def test_deterministic_bit_identical(self, model):
        mission = constant_mission(40, t0=38.0)
        a = run(mission, ConstantController(3000.0), model)
        b = run(mission, ConstantController(3000.0), model)
        assert np.array_equal(a.t_in_c, b.t_in_c)
        assert np.array_equal(a.cum_energy_j, b.cum_energy_j)

    def test_bounded_temperature_sanity(self, model):
        mission = constant_mission(300, t0=40.0)
        trace = run(mission, ConstantController(6800.0), model)
        assert np.all(np.isfinite(trace.t_in_c))
        assert trace.t_in_c.min() > -50.0

    def test_divergence_aborts_with_step_index(self, model):
        class BrokenController:
            def command(self, inp):
                return float("nan") if inp.step >= 3 else 1000.0

        with pytest.raises(RuntimeError, match="step 3"):
            run(constant_mission(10), BrokenController(), model)


class TestMetrics:
    def trace_with_temps(self, temps, powers=None):
        n = len(temps)
        powers = np.zeros(n) if powers is None else np.asarray(powers, dtype=float)
        zeros = np.zeros(n)
        return SimulationTrace(times_s=np.arange(float(n)), speeds_kmh=zeros,
                               ambient_c=zeros, solar_wm2=zeros,
                               t_in_c=np.asarray(temps, dtype=float),
                               q_cool_w=zeros, p_ac_w=powers, cop=zeros + 2.0,
                               q_conduction_w=zeros, q_radiation_w=zeros,
                               q_occupants_w=zeros, q_ventilation_w=zeros,
                               cum_energy_j=np.cumsum(powers))

    def test_constant_temperature(self):
        m = metrics(self.trace_with_temps([23.0] * 10))
        assert m.mean_temp_c == 23.0 and m.temp_std_c == 0.0

    def test_two_point_population_std(self):
        m = metrics(self.trace_with_temps([22.0, 24.0] * 5))
        assert m.mean_temp_c == pytest.approx(23.0)
        assert m.temp_std_c == pytest.approx(1.0)

    def test_saving_fraction(self):
        trace = self.trace_with_temps([23.0] * 4, powers=[5e5] * 4)
        baseline = self.trace_with_temps([23.0] * 4, powers=[592450.0] * 4)
        m = metrics(trace, baseline=baseline)
        assert m.saving_vs_baseline == pytest.approx(0.156, abs=5e-4)

    def test_empty_trace_rejected(self):
        with pytest.raises(ValueError):
            metrics(self.trace_with_temps([]))

    def test_skip_initial_excludes_pulldown(self):
        temps = [40.0] * 5 + [23.0] * 15
        full = metrics(self.trace_with_temps(temps))
        steady = metrics(self.trace_with_temps(temps), skip_initial_s=5.0)
        assert steady.temp_std_c == 0.0 and steady.mean_temp_c == 23.0
        assert full.temp_std_c > 5.0

    @given(st.lists(st.floats(15.0, 45.0), min_size=1, max_size=60))
    @settings(max_examples=40, deadline=None)
    def test_matches_two_pass_reference(self, temps):
        m = metrics(self.trace_with_temps(temps))
        n = len(temps)
        mean = sum(temps) / n
        var = sum((t - mean) ** 2 for t in temps) / n
        assert m.mean_temp_c == pytest.approx(mean, rel=1e-12, abs=1e-12)
        assert m.temp_std_c == pytest.approx(var ** 0.5, rel=1e-12, abs=1e-12)


class TestScaleCycle:
    def test_identity(self):
        cycle = synthetic_cycle("urban", 50, seed=1)
        scaled = scale_cycle(cycle, 1.0)
        assert np.array_equal(scaled.speeds_kmh, cycle.speeds_kmh)
        assert np.array_equal(scaled.times_s, cycle.times_s)

    def test_low_speed_factor(self):
        cycle = CycleFile(np.arange(3.0), np.array([50.0, 10.0, 0.0]))
        scaled = scale_cycle(cycle, 0.68)
        assert scaled.speeds_kmh[0] == pytest.approx(34.0)

    def test_high_speed_factor(self):
        cycle = CycleFile(np.arange(2.0), np.array([40.0, 20.0]))
        assert scale_cycle(cycle, 1.45).speeds_kmh[0] == pytest.approx(58.0)

    def test_rejects_nonpositive(self):
        cycle = CycleFile(np.arange(2.0), np.array([40.0, 20.0]))
        with pytest.raises(ValueError):
            scale_cycle(cycle, 0.0)


class TestMission:
    def test_misaligned_traces_rejected(self):
        with pytest.raises(ValueError):
            Mission(times_s=np.arange(3.0), speeds_kmh=np.zeros(2),
                    ambient_c=np.zeros(3), solar_wm2=np.zeros(3))

    def test_from_cycle_broadcasts_constants(self):
        cycle = synthetic_cycle("urban", 30, seed=2)
        mission = Mission.from_cycle(cycle, 31.0, 700.0)
        assert np.all(mission.ambient_c == 31.0)
        assert np.all(mission.solar_wm2 == 700.0)
        assert len(mission) == len(cycle)

    def test_env_sample_converts_speed_to_ms(self):
        mission = constant_mission(2, speed=36.0)
        assert mission.env_sample(0).air_speed_ms == pytest.approx(10.0)
