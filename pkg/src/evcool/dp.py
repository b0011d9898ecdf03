"""Finite-horizon dynamic programming over (cabin temperature, cooling capacity).

State: (T_in, previous capacity); control: the next capacity, restricted to
grid points.  A command is feasible when it respects the capacity bounds and
the slew limit relative to the previous capacity.  Backward induction runs
over stage x temperature-state x capacity-state with the value function
interpolated linearly along the temperature axis for off-grid successors
(clamped at the axis ends).  The forward pass re-optimizes at the exact
(off-grid) temperature against the stored value tables, so the returned cost
is the cost actually realized by the returned command sequence.

Memory note: the per-stage value tables kept for the rollout take
(H+1) * n_temp * n_q * 8 bytes (about 90 MB for a 1370 s mission on the
default grid), released when solve() returns.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import CabinModel
from .thermal import EnvironmentSample

KMH_TO_MS = 1.0 / 3.6
_FEAS_EPS = 1e-9


@dataclass(frozen=True)
class Grid:
    """Discretization of the state/control space plus the step length."""

    temp_axis: np.ndarray
    q_axis: np.ndarray
    dt_s: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "temp_axis", np.asarray(self.temp_axis, dtype=float))
        object.__setattr__(self, "q_axis", np.asarray(self.q_axis, dtype=float))
        for name, axis in (("temp_axis", self.temp_axis), ("q_axis", self.q_axis)):
            if axis.ndim != 1 or axis.size < 2 or np.any(np.diff(axis) <= 0):
                raise ValueError(f"{name} must be a strictly increasing vector")
        if self.dt_s <= 0:
            raise ValueError("dt must be > 0")

    @classmethod
    def regular(cls, temp_min_c: float, temp_max_c: float, temp_step_c: float,
                q_min_w: float, q_max_w: float, q_step_w: float, dt_s: float = 1.0) -> "Grid":
        n_t = int(round((temp_max_c - temp_min_c) / temp_step_c))
        n_q = int(round((q_max_w - q_min_w) / q_step_w))
        return cls(temp_min_c + temp_step_c * np.arange(n_t + 1),
                   q_min_w + q_step_w * np.arange(n_q + 1), dt_s)

    def nearest_q_index(self, q_w: float) -> int:
        return int(np.argmin(np.abs(self.q_axis - q_w)))


@dataclass(frozen=True)
class StageCost:
    """Running cost weights: energy_weight*P_AC + comfort_weight*(T - target)^2."""

    energy_weight: float = 1.0
    comfort_weight: float = 500.0
    target_temp_c: float = 23.0

    def __post_init__(self):
        if self.energy_weight < 0 or self.comfort_weight < 0:
            raise ValueError("cost weights must be >= 0")
        if self.energy_weight == 0 and self.comfort_weight == 0:
            raise ValueError("at least one cost weight must be positive")


@dataclass(frozen=True)
class DisturbanceSequence:
    """Per-stage environment over the horizon: speed, ambient and solar."""

    times_s: np.ndarray
    speeds_kmh: np.ndarray
    ambient_c: np.ndarray
    solar_wm2: np.ndarray

    def __post_init__(self):
        for name in ("times_s", "speeds_kmh", "ambient_c", "solar_wm2"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        n = self.times_s.size
        if any(getattr(self, f).size != n
               for f in ("speeds_kmh", "ambient_c", "solar_wm2")):
            raise ValueError("disturbance arrays must have equal length")
        if n == 0:
            raise ValueError("disturbance sequence must not be empty")
        if n > 1 and np.any(np.diff(self.times_s) <= 0):
            raise ValueError("disturbance time stamps must be strictly increasing")

    def __len__(self):
        return self.times_s.size

    def sample(self, k: int) -> EnvironmentSample:
        return EnvironmentSample(
            time_s=float(self.times_s[k]),
            ambient_c=float(self.ambient_c[k]),
            solar_wm2=float(self.solar_wm2[k]),
            air_speed_ms=float(self.speeds_kmh[k]) * KMH_TO_MS,
        )


@dataclass(frozen=True)
class Policy:
    """Optimal command index per (stage, temperature node, previous-capacity node).

    ``commands[k, i, jp]`` indexes ``grid.q_axis``; -1 marks pruned states
    with no feasible command.
    """

    commands: np.ndarray  # int16, shape (H, nT, nQ)
    grid: Grid

    def command_w(self, stage: int, temp_index: int, q_index: int) -> float:
        j = int(self.commands[stage, temp_index, q_index])
        if j < 0:
            raise ValueError("state was pruned (no feasible command)")
        return float(self.grid.q_axis[j])


@dataclass(frozen=True)
class DpSolution:
    policy: Policy
    values_start: np.ndarray  # value function at stage 0, shape (nT, nQ)
    temps_c: np.ndarray       # realized trajectory, length H+1
    commands_w: np.ndarray    # length H
    powers_w: np.ndarray      # length H
    stage_costs: np.ndarray   # length H
    total_cost: float


def stage_cost(p_ac_w, t_in_c, cost: StageCost, dt_s: float):
    """Running cost of one step: (w1*P + w2*(T - target)^2) * dt."""
    if np.any(np.asarray(p_ac_w) < 0):
        raise ValueError("electric power must be >= 0")
    err = np.asarray(t_in_c, dtype=float) - cost.target_temp_c
    out = (cost.energy_weight * p_ac_w + cost.comfort_weight * err * err) * dt_s
    return float(out) if np.ndim(out) == 0 else out


def transition(t_in_c: float, q_prev_w: float, q_cmd_w: float, env: EnvironmentSample,
               model: CabinModel, dt_s: float):
    """Apply one feasible command: integrate the cabin ODE, advance the capacity state."""
    limits = model.limits
    if not limits.q_cool_min_w - _FEAS_EPS <= q_cmd_w <= limits.q_cool_max_w + _FEAS_EPS:
        raise ValueError(f"command {q_cmd_w} W outside capacity bounds")
    if abs(q_cmd_w - q_prev_w) > limits.rate_limit_w_per_s * dt_s + _FEAS_EPS:
        raise ValueError(f"command step {q_cmd_w - q_prev_w:+.1f} W exceeds the slew limit")
    return model.step_temperature(env, t_in_c, q_cmd_w, dt_s), q_cmd_w


def _interp_values(temp_axis: np.ndarray, v_next: np.ndarray, t_query: np.ndarray,
                   cols) -> np.ndarray:
    """Linear interpolation of v_next[:, cols] at t_query, clamped at axis ends."""
    idx = np.clip(np.searchsorted(temp_axis, t_query, side="right") - 1,
                  0, temp_axis.size - 2)
    w = np.clip((t_query - temp_axis[idx]) / (temp_axis[idx + 1] - temp_axis[idx]), 0.0, 1.0)
    lo = v_next[idx, cols]
    hi = v_next[idx + 1, cols]
    with np.errstate(invalid="ignore"):
        out = (1.0 - w) * lo + w * hi
    # 0 * inf from pruned nodes yields nan; an infeasible endpoint poisons the cell.
    bad = np.isinf(lo) | np.isinf(hi)
    if bad.any():
        out = np.where(bad, np.inf, out)
    return out


class _Stage:
    """Per-stage tables: successor temperatures, stage costs, electric power."""

    def __init__(self, model: CabinModel, grid: Grid, cost: StageCost,
                 env: EnvironmentSample, f_plr: np.ndarray):
        self.env = env
        t = grid.temp_axis[:, None]
        q = grid.q_axis[None, :]
        self.t_next = model.step_temperature(env, t, q, grid.dt_s)
        base = np.asarray(model.cop_map.base(
            grid.temp_axis, np.full_like(grid.temp_axis, env.ambient_c)))
        self.power = q / (base[:, None] * f_plr[None, :])
        err = grid.temp_axis - cost.target_temp_c
        self.cost = (cost.energy_weight * self.power
                     + cost.comfort_weight * (err * err)[:, None]) * grid.dt_s


def _window_min(m: np.ndarray, q_axis: np.ndarray, swing: float):
    """Per previous-capacity minimum of m over the feasible command window.

    Returns (values (nT, nQ), argmin command index (nT, nQ)).  Windows are
    contiguous because the axis is sorted; the uniform-spacing case uses a
    sliding window, the general case a masked reduction.
    """
    n_q = q_axis.size
    spacing = np.diff(q_axis)
    if np.allclose(spacing, spacing[0]):
        shift = int(np.searchsorted(q_axis, q_axis[0] + swing, side="right") - 1)
        padded = np.pad(m, ((0, 0), (shift, shift)), constant_values=np.inf)
        windows = np.lib.stride_tricks.sliding_window_view(padded, 2 * shift + 1, axis=1)
        arg = np.argmin(windows, axis=2)
        values = np.take_along_axis(windows, arg[:, :, None], axis=2)[:, :, 0]
        best = arg + np.arange(n_q)[None, :] - shift
    else:
        feasible = np.abs(q_axis[:, None] - q_axis[None, :]) <= swing  # (jp, j)
        masked = np.where(feasible[None, :, :], m[:, None, :], np.inf)
        best = np.argmin(masked, axis=2)
        values = np.take_along_axis(masked, best[:, :, None], axis=2)[:, :, 0]
    return values, best


def solve(model: CabinModel, grid: Grid, cost: StageCost,
          disturbances: DisturbanceSequence, x0: tuple[float, float],
          terminal_band: tuple[float, float] | None = None,
          terminal_values: np.ndarray | None = None) -> DpSolution:
    """Backward-induction solve over the horizon, then a forward rollout from x0.

    ``x0`` is (initial cabin temperature degC, initial capacity W); the initial
    capacity snaps to the nearest grid point, the temperature is used exactly.
    ``terminal_band`` optionally constrains the final temperature to a band
    (states outside it take infinite value); ``terminal_values`` optionally
    adds a terminal cost table over (temperature node, capacity node), e.g. a
    cost-to-go estimate for truncated receding-horizon subproblems.  Raises if
    the capacity axis violates the plant limits, the initial temperature
    leaves the grid, or no feasible command exists from the initial state.

    The reported ``total_cost`` excludes the terminal table (it is the realized
    running cost of the returned command sequence).
    """
    limits = model.limits
    q_axis = grid.q_axis
    if q_axis[0] < limits.q_cool_min_w - _FEAS_EPS or q_axis[-1] > limits.q_cool_max_w + _FEAS_EPS:
        raise ValueError("capacity axis exceeds the plant limits")
    t0, q0 = x0
    if not grid.temp_axis[0] - 1e-9 <= t0 <= grid.temp_axis[-1] + 1e-9:
        raise ValueError(f"initial temperature {t0} outside the grid")

    horizon = len(disturbances)
    n_t, n_q = grid.temp_axis.size, q_axis.size
    swing = limits.rate_limit_w_per_s * grid.dt_s + _FEAS_EPS
    f_plr = np.asarray(model.cop_map.plr_multiplier(q_axis / limits.nominal_capacity_w))
    stages = [_Stage(model, grid, cost, disturbances.sample(k), f_plr)
              for k in range(horizon)]

    if terminal_values is None:
        v_terminal = np.zeros((n_t, n_q))
    else:
        v_terminal = np.asarray(terminal_values, dtype=float)
        if v_terminal.shape != (n_t, n_q):
            raise ValueError(f"terminal_values must have shape {(n_t, n_q)}")
        if np.any(v_terminal < 0):
            raise ValueError("terminal_values must be >= 0")
    if terminal_band is not None:
        t_lo, t_hi = terminal_band
        inside = (grid.temp_axis >= t_lo) & (grid.temp_axis <= t_hi)
        v_terminal = np.where(inside[:, None], v_terminal, np.inf)

    cols = np.arange(n_q)[None, :]
    values = [None] * (horizon + 1)  # value tables kept for the exact-state rollout
    values[horizon] = v_terminal
    commands = np.empty((horizon, n_t, n_q), dtype=np.int16)
    for k in range(horizon - 1, -1, -1):
        st = stages[k]
        m = st.cost + _interp_values(grid.temp_axis, values[k + 1], st.t_next, cols)
        values[k], best = _window_min(m, q_axis, swing)
        commands[k] = np.where(np.isfinite(values[k]), best, -1).astype(np.int16)

    policy = Policy(commands=commands, grid=grid)

    lo_j = np.searchsorted(q_axis, q_axis - swing, side="left")
    hi_j = np.searchsorted(q_axis, q_axis + swing, side="right") - 1

    temps = np.empty(horizon + 1)
    commands_w = np.empty(horizon)
    powers = np.empty(horizon)
    costs = np.empty(horizon)
    temps[0] = t_cur = float(t0)
    jp = grid.nearest_q_index(q0)
    for k in range(horizon):
        st = stages[k]
        js = np.arange(lo_j[jp], hi_j[jp] + 1)
        q_cmds = q_axis[js]
        t_next = np.asarray(model.step_temperature(st.env, t_cur, q_cmds, grid.dt_s))
        p_ac, _ = model.power(st.env, t_cur, q_cmds)
        c_now = np.asarray(stage_cost(p_ac, t_cur, cost, grid.dt_s))
        total = c_now + _interp_values(grid.temp_axis, values[k + 1], t_next, js)
        pick = int(np.argmin(total))
        if not np.isfinite(total[pick]):
            raise ValueError(f"no feasible command at stage {k} from the initial state")
        jp = int(js[pick])
        commands_w[k] = q_axis[jp]
        powers[k] = p_ac[pick]
        costs[k] = c_now[pick]
        t_cur = float(t_next[pick])
        temps[k + 1] = t_cur

    return DpSolution(policy=policy, values_start=values[0], temps_c=temps,
                      commands_w=commands_w, powers_w=powers, stage_costs=costs,
                      total_cost=float(costs.sum()))
