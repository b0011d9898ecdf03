import numpy as np
import pytest

from evcool.controllers import (BangBangConfig, BangBangController, ControllerInput,
                                DpBenchmarkController, MarkovPredictor,
                                PerfectPredictor, SmpcController, bang_bang_step,
                                dp_benchmark)
from evcool.dp import DisturbanceSequence, Grid, StageCost, solve
from evcool.markov import TransitionMatrix, VelocityQuantizer
from evcool.plant import PlantLimits
from evcool.simulate import Mission, run
from evcool.thermal import EnvironmentSample

from conftest import make_toy_model
from test_dp import constant_disturbances, enumerate_min_cost


@pytest.fixture()
def band():
    return BangBangConfig(t_high_c=26.0, t_low_c=20.0, k_rule_w=1000.0,
                          b_rule_w=2000.0, hysteresis=False)


@pytest.fixture()
def limits():
    return PlantLimits()


def make_input(t_in, q_prev=0.0, step=0, speed=30.0):
    env = EnvironmentSample(float(step), 33.0, 830.0, speed / 3.6)
    return ControllerInput(step=step, time_s=float(step), t_in_c=t_in,
                           q_prev_w=q_prev, speed_kmh=speed, env=env)


class TestBangBangStep:
    def test_above_band_max_cooling(self, band, limits):
        assert bang_bang_step(27.0, band, limits) == 6800.0

    def test_below_band_min_cooling(self, band, limits):
        assert bang_bang_step(19.0, band, limits) == 0.0

    def test_mid_band_ramp(self, band, limits):
        assert bang_bang_step(23.0, band, limits) == pytest.approx(2500.0)

    def test_piecewise_affine_breakpoints(self, band, limits):
        eps = 1e-9
        assert bang_bang_step(band.t_high_c, band, limits) == limits.q_cool_max_w
        assert bang_bang_step(band.t_high_c - eps, band, limits) == \
            pytest.approx(band.k_rule_w + band.b_rule_w)
        assert bang_bang_step(band.t_low_c, band, limits) == limits.q_cool_min_w
        assert bang_bang_step(band.t_low_c + eps, band, limits) == \
            pytest.approx(band.b_rule_w)

    def test_pure_function_of_temperature(self, band, limits):
        values = [bang_bang_step(24.3, band, limits) for _ in range(5)]
        assert len(set(values)) == 1

    def test_band_order_enforced(self):
        with pytest.raises(ValueError):
            BangBangConfig(t_high_c=20.0, t_low_c=26.0)


class TestBangBangController:
    def test_literal_mode_matches_step_rule(self, band, limits):
        ctrl = BangBangController(band, limits)
        for t in (18.0, 21.0, 25.0, 27.0):
            assert ctrl.command(make_input(t)) == bang_bang_step(t, band, limits)

    def test_hysteresis_latches_until_lower_edge(self, limits):
        cfg = BangBangConfig(t_high_c=26.0, t_low_c=20.0, hysteresis=True)
        ctrl = BangBangController(cfg, limits)
        assert ctrl.command(make_input(27.0)) == limits.q_cool_max_w
        # still latched inside the band on the way down
        assert ctrl.command(make_input(23.0)) == limits.q_cool_max_w
        # released at the lower edge, back to the printed rules
        assert ctrl.command(make_input(19.9)) == limits.q_cool_min_w
        assert ctrl.command(make_input(23.0)) == pytest.approx(2500.0)

    def test_reset_clears_latch(self, limits):
        cfg = BangBangConfig(hysteresis=True)
        ctrl = BangBangController(cfg, limits)
        ctrl.command(make_input(30.0))
        ctrl.reset()
        mid = 0.5 * (cfg.t_low_c + cfg.t_high_c)
        assert ctrl.command(make_input(mid)) == \
            bang_bang_step(mid, cfg, limits)


class TestDpBenchmark:
    def test_horizon_one_is_single_stage_argmin(self):
        model = make_toy_model(load_w=1000.0)
        grid = Grid(temp_axis=[24.0, 25.0, 26.0], q_axis=[0.0, 1000.0], dt_s=1.0)
        cost = StageCost(1.0, 1e-9, 25.0)
        dist = constant_disturbances(1)
        sol = dp_benchmark(model, grid, cost, dist, (25.0, 0.0))
        assert sol.commands_w.size == 1 and sol.commands_w[0] == 0.0

    def test_tiny_mission_matches_enumeration(self):
        model = make_toy_model(load_w=1500.0, rate_limit=900.0)
        grid = Grid(temp_axis=24.0 + 0.25 * np.arange(5),
                    q_axis=[0.0, 800.0, 1600.0], dt_s=1.0)
        cost = StageCost(1.0, 200.0, 24.5)
        dist = constant_disturbances(4)
        sol = dp_benchmark(model, grid, cost, dist, (25.0, 800.0))
        brute = enumerate_min_cost(model, grid, cost, dist, (25.0, 800.0))
        assert sol.total_cost == pytest.approx(brute, rel=1e-6)

    def test_balanced_cabin_with_comfort_weight_stays_off(self):
        # ventilation exactly cancels the occupant heat: zero net load
        from evcool.model import CabinModel
        from evcool.plant import CopMap
        from evcool.thermal import CabinAirConfig, VehicleThermalConfig

        cabin = CabinAirConfig(recirculation_coeff=0.0, passengers=0,
                               occupant_correction=1.0)
        thermal = VehicleThermalConfig(panels=(), windows=(), cabin=cabin)
        flow = cabin.evaporator_mass_flow_kg_s * cabin.air_heat_capacity_j_kgk
        t_target = 24.0
        t_out = t_target - 145.0 / flow  # vent = -145 W at the target
        cop_map = CopMap([0.0, 50.0], [-20.0, 40.0], [[2.0, 2.0], [2.0, 2.0]],
                         [0.0, 1.0], [1.0, 1.0])
        limits = PlantLimits(rate_limit_w_per_s=1e9)
        model = CabinModel(thermal, cop_map, limits)
        grid = Grid(temp_axis=[23.0, 24.0, 25.0], q_axis=[0.0, 500.0, 1000.0])
        cost = StageCost(energy_weight=1e-6, comfort_weight=1e5, target_temp_c=t_target)
        dist = DisturbanceSequence(np.arange(5.0), np.zeros(5),
                                   np.full(5, t_out), np.zeros(5))
        sol = dp_benchmark(model, grid, cost, dist, (t_target, 0.0))
        assert np.all(sol.commands_w == 0.0)
        assert np.all(np.abs(sol.temps_c - t_target) < 1e-9)

    def test_controller_plays_planned_sequence(self, cfg, model):
        dist = constant_disturbances(30)
        mission = Mission(times_s=dist.times_s, speeds_kmh=dist.speeds_kmh,
                          ambient_c=dist.ambient_c, solar_wm2=dist.solar_wm2,
                          initial_temp_c=28.0, initial_q_w=0.0, name="plan")
        ctrl = DpBenchmarkController(model, cfg.grid, cfg.cost, dist, (28.0, 0.0))
        trace = run(mission, ctrl, model)
        assert np.array_equal(trace.q_cool_w, ctrl.solution.commands_w)
        assert np.array_equal(trace.t_in_c, ctrl.solution.temps_c[:-1])


def uniform_matrix(p=60):
    counts = np.eye(p, dtype=np.int64) * 5
    return TransitionMatrix(counts, VelocityQuantizer(2.0, 120.0))


class TestSmpc:
    def test_horizon_one_is_myopic_argmin(self, cfg, model):
        dist = constant_disturbances(10)
        smpc = SmpcController(model, cfg.grid, cfg.cost, uniform_matrix(), 1, dist,
                              terminal_tail_s=0.0)
        inp = make_input(26.0, q_prev=3000.0, step=0, speed=40.0)
        got = smpc.command(inp)
        direct = solve(model, cfg.grid, cfg.cost,
                       DisturbanceSequence(dist.times_s[:1], [40.0],
                                           dist.ambient_c[:1], dist.solar_wm2[:1]),
                       (26.0, 3000.0))
        assert got == direct.commands_w[0]

    def test_horizon_one_with_tail_matches_tail_augmented_solve(self, cfg, model):
        dist = constant_disturbances(10)
        smpc = SmpcController(model, cfg.grid, cfg.cost, uniform_matrix(), 1, dist,
                              terminal_tail_s=30.0)
        inp = make_input(26.0, q_prev=3000.0, step=0, speed=40.0)
        direct = solve(model, cfg.grid, cfg.cost,
                       DisturbanceSequence(dist.times_s[:1], [40.0],
                                           dist.ambient_c[:1], dist.solar_wm2[:1]),
                       (26.0, 3000.0), terminal_values=smpc._tail)
        assert smpc.command(inp) == direct.commands_w[0]

    def test_steady_state_tracks_equilibrium_load(self, cfg, model):
        # hold at target: command must sit within one control-grid step of the load
        speed = 40.0
        env = EnvironmentSample(0.0, 33.0, 830.0, speed / 3.6)
        cost = StageCost(energy_weight=1.0, comfort_weight=5e4,
                         target_temp_c=cfg.cost.target_temp_c)
        load = model.equilibrium_load(env, cost.target_temp_c)
        q_star = cfg.grid.q_axis[np.argmin(np.abs(cfg.grid.q_axis - load))]
        dist = constant_disturbances(60, speed=speed)
        mission = Mission(dist.times_s, dist.speeds_kmh, dist.ambient_c,
                          dist.solar_wm2, initial_temp_c=cost.target_temp_c,
                          initial_q_w=q_star, name="steady")
        smpc = SmpcController(model, cfg.grid, cost,
                              PerfectPredictor(mission.speeds_kmh),
                              cfg.smpc_horizon, dist,
                              terminal_tail_s=cfg.smpc_terminal_tail_s)
        trace = run(mission, smpc, model)
        step = np.diff(cfg.grid.q_axis).max()
        core = trace.q_cool_w[: len(trace) - cfg.smpc_horizon]  # drop end relaxation
        assert np.all(np.abs(core - load) <= step + 1e-9)
        assert np.all(np.abs(trace.t_in_c - cost.target_temp_c) < 0.3)

    def test_perfect_predictor_full_horizon_matches_dp(self, cfg, model):
        rng = np.random.default_rng(8)
        n = 40
        dist = DisturbanceSequence(np.arange(float(n)),
                                   np.abs(rng.normal(30, 12, n)),
                                   np.full(n, 33.0), np.full(n, 830.0))
        mission = Mission(dist.times_s, dist.speeds_kmh, dist.ambient_c,
                          dist.solar_wm2, initial_temp_c=30.0, initial_q_w=0.0,
                          name="degen")
        dp_ctrl = DpBenchmarkController(model, cfg.grid, cfg.cost, dist, (30.0, 0.0))
        dp_trace = run(mission, dp_ctrl, model)
        smpc = SmpcController(model, cfg.grid, cfg.cost,
                              PerfectPredictor(mission.speeds_kmh), n, dist)
        smpc_trace = run(mission, smpc, model)
        assert np.array_equal(smpc_trace.q_cool_w, dp_trace.q_cool_w)
        assert np.array_equal(smpc_trace.t_in_c, dp_trace.t_in_c)

    def test_deterministic_given_same_inputs(self, cfg, model):
        dist = constant_disturbances(8)
        a = SmpcController(model, cfg.grid, cfg.cost, uniform_matrix(), 5, dist)
        b = SmpcController(model, cfg.grid, cfg.cost, uniform_matrix(), 5, dist)
        inp = make_input(25.0, q_prev=2000.0, step=2)
        assert a.command(inp) == b.command(inp)

    def test_fallback_events_recorded_not_fatal(self, cfg, model):
        # empty-ish matrix: current state never visited -> persistence + flags
        p = 60
        counts = np.zeros((p, p), dtype=np.int64)
        counts[0, 0] = 3
        matrix = TransitionMatrix(counts, VelocityQuantizer(2.0, 120.0))
        dist = constant_disturbances(10, speed=50.0)
        smpc = SmpcController(model, cfg.grid, cfg.cost,
                              MarkovPredictor(matrix), 5, dist)
        inp = make_input(24.0, q_prev=2000.0, step=0, speed=50.0)
        smpc.command(inp)
        assert len(smpc.fallback_events) == 4  # offsets 1..H-1
        assert all(k == 0 and 1 <= off <= 4 for k, off in smpc.fallback_events)

    def test_perfect_predictor_past_trace_end_pads(self):
        pred = PerfectPredictor([10.0, 20.0, 30.0])
        speeds, flags = pred.predict_sequence(30.0, 4, step=1)
        assert speeds.tolist() == [30.0, 30.0, 30.0, 30.0]
        assert not flags.any()
