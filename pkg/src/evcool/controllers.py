"""The three control strategies behind one ``command(inp)`` interface.

  * rule-based bang-bang thermostat (with an optional latch that holds max
    cooling until the lower band edge, reproducing the classic full-band
    oscillation),
  * the full-information dynamic-programming benchmark (open-loop optimal
    command sequence for the whole mission),
  * the receding-horizon stochastic MPC that predicts speeds over the horizon
    with the Markov chain, solves the horizon problem with the DP core and
    applies only the first command.

Controllers return a *requested* capacity; the simulator pushes every request
through the slew/bound clamp so all strategies face identical plant limits.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import dp
from .markov import TransitionMatrix, predict
from .model import CabinModel
from .plant import PlantLimits
from .thermal import EnvironmentSample


@dataclass(frozen=True)
class ControllerInput:
    """Feedback available to a controller at the start of a step."""

    step: int
    time_s: float
    t_in_c: float
    q_prev_w: float
    speed_kmh: float
    env: EnvironmentSample

    def __post_init__(self):
        if not all(np.isfinite(v) for v in
                   (self.time_s, self.t_in_c, self.q_prev_w, self.speed_kmh)):
            raise ValueError("controller inputs must be finite")


@dataclass(frozen=True)
class BangBangConfig:
    t_high_c: float = 26.0
    t_low_c: float = 20.0
    k_rule_w: float = 1000.0
    b_rule_w: float = 2000.0
    hysteresis: bool = True

    def __post_init__(self):
        if self.t_low_c >= self.t_high_c:
            raise ValueError("t_low must be below t_high")


def bang_bang_step(t_in_c: float, cfg: BangBangConfig, limits: PlantLimits) -> float:
    """Literal thermostat rules: max above the band, min below, a ramp inside.

    Pure in t_in; piecewise affine with breakpoints exactly at the band edges.
    """
    if t_in_c >= cfg.t_high_c:
        return limits.q_cool_max_w
    if t_in_c <= cfg.t_low_c:
        return limits.q_cool_min_w
    frac = (t_in_c - cfg.t_low_c) / (cfg.t_high_c - cfg.t_low_c)
    return cfg.k_rule_w * frac + cfg.b_rule_w


class BangBangController:
    """Thermostat controller; with hysteresis it latches max cooling down to t_low."""

    def __init__(self, cfg: BangBangConfig, limits: PlantLimits):
        self.cfg = cfg
        self.limits = limits
        self._latched = False

    def reset(self) -> None:
        self._latched = False

    def command(self, inp: ControllerInput) -> float:
        cfg = self.cfg
        if cfg.hysteresis:
            if inp.t_in_c >= cfg.t_high_c:
                self._latched = True
            elif inp.t_in_c <= cfg.t_low_c:
                self._latched = False
            if self._latched:
                return self.limits.q_cool_max_w
        return bang_bang_step(inp.t_in_c, cfg, self.limits)


def dp_benchmark(model: CabinModel, grid: dp.Grid, cost: dp.StageCost,
                 disturbances: dp.DisturbanceSequence,
                 x0: tuple[float, float]) -> dp.DpSolution:
    """Global optimum with full disturbance knowledge over the whole mission."""
    return dp.solve(model, grid, cost, disturbances, x0)


class DpBenchmarkController:
    """Plays back the open-loop optimal command sequence from the DP benchmark."""

    def __init__(self, model: CabinModel, grid: dp.Grid, cost: dp.StageCost,
                 disturbances: dp.DisturbanceSequence, x0: tuple[float, float]):
        self.solution = dp_benchmark(model, grid, cost, disturbances, x0)

    def reset(self) -> None:
        pass

    def command(self, inp: ControllerInput) -> float:
        if inp.step >= self.solution.commands_w.size:
            raise IndexError("simulation ran past the planned mission length")
        return float(self.solution.commands_w[inp.step])


class MarkovPredictor:
    """Speed predictor backed by a fitted transition matrix."""

    def __init__(self, matrix: TransitionMatrix, mode: str = "argmax", seed=None):
        self.matrix = matrix
        self.mode = mode
        self._rng = np.random.default_rng(seed)

    def predict_sequence(self, current_speed_kmh: float, horizon: int, step: int):
        p = predict(self.matrix, current_speed_kmh, horizon, mode=self.mode, rng=self._rng)
        return p.speeds_kmh, p.fallback


class PerfectPredictor:
    """Oracle that returns the true upcoming speeds (for degeneracy checks)."""

    def __init__(self, speeds_kmh):
        self.speeds_kmh = np.asarray(speeds_kmh, dtype=float)

    def predict_sequence(self, current_speed_kmh: float, horizon: int, step: int):
        future = self.speeds_kmh[step + 1: step + 1 + horizon]
        if future.size < horizon:  # hold the last sample past the trace end
            pad = np.full(horizon - future.size,
                          self.speeds_kmh[-1] if self.speeds_kmh.size else current_speed_kmh)
            future = np.concatenate([future, pad])
        return future, np.zeros(horizon, dtype=bool)


class SmpcController:
    """Receding-horizon controller: predict speeds, solve the horizon DP, apply
    the first command.

    Solar flux and ambient temperature over the horizon are looked up from the
    known environment sequence; only the speed is predicted.  The first horizon
    step uses the measured current speed, later steps the predictions.  Every
    persistence fallback of the predictor is recorded in ``fallback_events`` as
    (mission step, horizon offset).

    A short horizon under-weights comfort relative to the full-mission optimum
    (an offset at the horizon end looks cheap when only a few comfort terms
    remain), so truncated subproblems carry a terminal comfort tail: the
    horizon-end temperature error is charged as if it persisted for
    ``terminal_tail_s`` further seconds.  The tail is dropped whenever the
    horizon reaches the mission end, so with a perfect predictor and a
    mission-length horizon the controller degenerates exactly to the DP
    benchmark.
    """

    def __init__(self, model: CabinModel, grid: dp.Grid, cost: dp.StageCost,
                 predictor, horizon: int, known: dp.DisturbanceSequence,
                 terminal_tail_s: float = 30.0):
        if horizon < 1:
            raise ValueError("horizon must be >= 1")
        if terminal_tail_s < 0:
            raise ValueError("terminal_tail_s must be >= 0")
        if isinstance(predictor, TransitionMatrix):
            predictor = MarkovPredictor(predictor)
        self.model = model
        self.grid = grid
        self.cost = cost
        self.predictor = predictor
        self.horizon = horizon
        self.known = known
        self.terminal_tail_s = terminal_tail_s
        err = grid.temp_axis - cost.target_temp_c
        self._tail = np.broadcast_to(
            (cost.comfort_weight * err * err * terminal_tail_s)[:, None],
            (grid.temp_axis.size, grid.q_axis.size)).copy()
        self.fallback_events: list[tuple[int, int]] = []

    def reset(self) -> None:
        self.fallback_events.clear()

    def plan(self, inp: ControllerInput) -> dp.DpSolution:
        k = inp.step
        n = len(self.known)
        if k >= n:
            raise IndexError("simulation ran past the known environment")
        h_eff = min(self.horizon, n - k)
        speeds = np.empty(h_eff)
        speeds[0] = inp.speed_kmh
        if h_eff > 1:
            predicted, fell_back = self.predictor.predict_sequence(
                inp.speed_kmh, self.horizon, k)
            speeds[1:] = predicted[: h_eff - 1]
            for offset in np.nonzero(fell_back[: h_eff - 1])[0]:
                self.fallback_events.append((k, int(offset) + 1))
        horizon_dist = dp.DisturbanceSequence(
            times_s=self.known.times_s[k: k + h_eff],
            speeds_kmh=speeds,
            ambient_c=self.known.ambient_c[k: k + h_eff],
            solar_wm2=self.known.solar_wm2[k: k + h_eff],
        )
        truncated = k + h_eff < n
        return dp.solve(self.model, self.grid, self.cost, horizon_dist,
                        (inp.t_in_c, inp.q_prev_w),
                        terminal_values=self._tail if truncated else None)

    def command(self, inp: ControllerInput) -> float:
        return float(self.plan(inp).commands_w[0])


class ConstantController:
    """Fixed-capacity request, used by tests and the hold-temperature sweeps."""

    def __init__(self, q_cool_w: float):
        self.q_cool_w = q_cool_w

    def reset(self) -> None:
        pass

    def command(self, inp: ControllerInput) -> float:
        return self.q_cool_w
