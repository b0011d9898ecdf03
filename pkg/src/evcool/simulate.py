"""Closed-loop mission simulation and its summary metrics.

One step: query the controller, clamp the request to the plant limits,
integrate the cabin ODE over the step with the capacity held constant,
convert capacity to electric power through the COP map and accumulate energy.
Temperatures and loads are recorded at the step start, cumulative energy at
the step end; the trace has exactly one row per mission sample.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .controllers import ControllerInput
from .cycles import CycleFile
from .dp import DisturbanceSequence
from .model import CabinModel
from .plant import clamp_command
from .thermal import EnvironmentSample

KMH_TO_MS = 1.0 / 3.6


@dataclass(frozen=True)
class Mission:
    """Time-aligned speed and environment traces plus the initial state."""

    times_s: np.ndarray
    speeds_kmh: np.ndarray
    ambient_c: np.ndarray
    solar_wm2: np.ndarray
    initial_temp_c: float = 40.0
    initial_q_w: float = 0.0
    name: str = ""

    def __post_init__(self):
        for attr in ("times_s", "speeds_kmh", "ambient_c", "solar_wm2"):
            object.__setattr__(self, attr, np.asarray(getattr(self, attr), dtype=float))
        n = self.times_s.size
        if any(getattr(self, a).size != n for a in ("speeds_kmh", "ambient_c", "solar_wm2")):
            raise ValueError("mission traces must be time-aligned and equal length")

    def __len__(self):
        return self.times_s.size

    def env_sample(self, k: int) -> EnvironmentSample:
        return EnvironmentSample(
            time_s=float(self.times_s[k]),
            ambient_c=float(self.ambient_c[k]),
            solar_wm2=float(self.solar_wm2[k]),
            air_speed_ms=float(self.speeds_kmh[k]) * KMH_TO_MS,
        )

    def disturbances(self) -> DisturbanceSequence:
        return DisturbanceSequence(times_s=self.times_s, speeds_kmh=self.speeds_kmh,
                                   ambient_c=self.ambient_c, solar_wm2=self.solar_wm2)

    @property
    def initial_state(self) -> tuple[float, float]:
        return self.initial_temp_c, self.initial_q_w

    @classmethod
    def from_cycle(cls, cycle: CycleFile, ambient_c, solar_wm2,
                   initial_temp_c: float = 40.0, initial_q_w: float = 0.0,
                   name: str = "") -> "Mission":
        """Build a mission from a cycle and per-sample (or constant) environment."""
        n = len(cycle)
        ambient = np.broadcast_to(np.asarray(ambient_c, dtype=float), (n,)).copy()
        solar = np.broadcast_to(np.asarray(solar_wm2, dtype=float), (n,)).copy()
        return cls(times_s=cycle.times_s, speeds_kmh=cycle.speeds_kmh,
                   ambient_c=ambient, solar_wm2=solar,
                   initial_temp_c=initial_temp_c, initial_q_w=initial_q_w,
                   name=name or cycle.name)


TRACE_COLUMNS = (
    "time_s", "speed_kmh", "ambient_c", "solar_wm2", "t_in_c", "q_cool_w",
    "p_ac_w", "cop", "q_conduction_w", "q_radiation_w", "q_occupants_w",
    "q_ventilation_w", "cum_energy_j",
)


@dataclass
class SimulationTrace:
    """Per-step record of one closed-loop run (arrays share one length)."""

    times_s: np.ndarray
    speeds_kmh: np.ndarray
    ambient_c: np.ndarray
    solar_wm2: np.ndarray
    t_in_c: np.ndarray
    q_cool_w: np.ndarray
    p_ac_w: np.ndarray
    cop: np.ndarray
    q_conduction_w: np.ndarray
    q_radiation_w: np.ndarray
    q_occupants_w: np.ndarray
    q_ventilation_w: np.ndarray
    cum_energy_j: np.ndarray
    dt_s: float = 1.0
    notes: dict = field(default_factory=dict)

    def __len__(self):
        return self.times_s.size

    @property
    def total_energy_j(self) -> float:
        return float(self.cum_energy_j[-1]) if len(self) else 0.0

    def columns(self) -> dict[str, np.ndarray]:
        mapping = {
            "time_s": self.times_s, "speed_kmh": self.speeds_kmh,
            "ambient_c": self.ambient_c, "solar_wm2": self.solar_wm2,
            "t_in_c": self.t_in_c, "q_cool_w": self.q_cool_w,
            "p_ac_w": self.p_ac_w, "cop": self.cop,
            "q_conduction_w": self.q_conduction_w, "q_radiation_w": self.q_radiation_w,
            "q_occupants_w": self.q_occupants_w, "q_ventilation_w": self.q_ventilation_w,
            "cum_energy_j": self.cum_energy_j,
        }
        return {name: mapping[name] for name in TRACE_COLUMNS}


@dataclass(frozen=True)
class RunMetrics:
    """Mission summary: energy, temperature statistics, saving vs a baseline."""

    total_energy_j: float
    mean_temp_c: float
    temp_std_c: float
    saving_vs_baseline: float | None = None


def run(mission: Mission, controller, model: CabinModel, dt_s: float = 1.0) -> SimulationTrace:
    """Simulate the controller against the plant over the mission."""
    n = len(mission)
    cols = {name: np.empty(n) for name in TRACE_COLUMNS}
    if hasattr(controller, "reset"):
        controller.reset()

    t_in = float(mission.initial_temp_c)
    q_prev = float(mission.initial_q_w)
    energy = 0.0
    for k in range(n):
        env = mission.env_sample(k)
        inp = ControllerInput(step=k, time_s=env.time_s, t_in_c=t_in, q_prev_w=q_prev,
                              speed_kmh=float(mission.speeds_kmh[k]), env=env)
        q_cool = clamp_command(q_prev, float(controller.command(inp)), dt_s, model.limits)
        loads = model.loads(env, t_in)
        p_ac, cop_value = model.power(env, t_in, q_cool)
        energy += p_ac * dt_s

        cols["time_s"][k] = env.time_s
        cols["speed_kmh"][k] = mission.speeds_kmh[k]
        cols["ambient_c"][k] = env.ambient_c
        cols["solar_wm2"][k] = env.solar_wm2
        cols["t_in_c"][k] = t_in
        cols["q_cool_w"][k] = q_cool
        cols["p_ac_w"][k] = p_ac
        cols["cop"][k] = cop_value
        cols["q_conduction_w"][k] = loads.conduction_w
        cols["q_radiation_w"][k] = loads.radiation_w
        cols["q_occupants_w"][k] = loads.occupants_w
        cols["q_ventilation_w"][k] = loads.ventilation_w
        cols["cum_energy_j"][k] = energy

        t_in = float(model.step_temperature(env, t_in, q_cool, dt_s))
        if not np.isfinite(t_in):
            raise RuntimeError(f"cabin temperature diverged at step {k} "
                               f"(t={env.time_s:.0f} s, q={q_cool:.0f} W)")
        q_prev = q_cool

    trace = SimulationTrace(
        times_s=cols["time_s"], speeds_kmh=cols["speed_kmh"], ambient_c=cols["ambient_c"],
        solar_wm2=cols["solar_wm2"], t_in_c=cols["t_in_c"], q_cool_w=cols["q_cool_w"],
        p_ac_w=cols["p_ac_w"], cop=cols["cop"], q_conduction_w=cols["q_conduction_w"],
        q_radiation_w=cols["q_radiation_w"], q_occupants_w=cols["q_occupants_w"],
        q_ventilation_w=cols["q_ventilation_w"], cum_energy_j=cols["cum_energy_j"],
        dt_s=dt_s, notes={"mission": mission.name,
                          "controller": type(controller).__name__,
                          "initial_q_w": float(mission.initial_q_w)},
    )
    fallbacks = getattr(controller, "fallback_events", None)
    if fallbacks is not None:
        trace.notes["predictor_fallback_steps"] = len(fallbacks)
    return trace


def metrics(trace: SimulationTrace, baseline: SimulationTrace | None = None,
            skip_initial_s: float = 0.0) -> RunMetrics:
    """Total energy plus mean / population standard deviation of the cabin temperature.

    Temperature statistics cover the full trace by default (the initial
    pull-down included); ``skip_initial_s`` can exclude a leading transient.
    Saving is 1 - energy/baseline energy when a baseline run is given.
    """
    if len(trace) == 0:
        raise ValueError("cannot compute metrics of an empty trace")
    sel = trace.times_s >= trace.times_s[0] + skip_initial_s
    temps = trace.t_in_c[sel]
    if temps.size == 0:
        raise ValueError("skip_initial_s removed the whole trace")
    saving = None
    if baseline is not None:
        saving = 1.0 - trace.total_energy_j / baseline.total_energy_j
    return RunMetrics(
        total_energy_j=trace.total_energy_j,
        mean_temp_c=float(np.mean(temps)),
        temp_std_c=float(np.std(temps)),
        saving_vs_baseline=saving,
    )


def scale_cycle(cycle: CycleFile, factor: float) -> CycleFile:
    """Scale every speed by a positive factor, keeping the timestamps."""
    if factor <= 0:
        raise ValueError("scale factor must be > 0")
    return CycleFile(cycle.times_s, cycle.speeds_kmh * factor,
                     name=f"{cycle.name}x{factor:g}" if cycle.name else "")


def limit_violations(trace: SimulationTrace, model: CabinModel) -> int:
    """Count steps violating the capacity bounds or the slew limit (0 = compliant)."""
    limits = model.limits
    q = trace.q_cool_w
    bad = int(np.sum((q < limits.q_cool_min_w - 1e-9) | (q > limits.q_cool_max_w + 1e-9)))
    if len(trace) > 1:
        dq = np.abs(np.diff(q)) / trace.dt_s
        bad += int(np.sum(dq > limits.rate_limit_w_per_s + 1e-9))
    initial_jump = abs(q[0] - trace.notes.get("initial_q_w", q[0])) if len(trace) else 0.0
    if initial_jump > limits.rate_limit_w_per_s * trace.dt_s + 1e-9:
        bad += 1
    return bad
