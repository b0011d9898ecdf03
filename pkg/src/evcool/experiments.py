"""Experiment harness: sensitivity sweeps and the controller comparison report.

Sweeps hold the cabin at an exact target temperature (capacity = instantaneous
equilibrium load, clamped to the plant limits) under constant conditions for a
fixed mission duration, so energies are comparable across swept values.
Comparisons run each controller over each mission and tabulate energy, saving
versus the bang-bang baseline, and the cabin temperature statistics.
"""

from __future__ import annotations

import concurrent.futures
import logging
from dataclasses import dataclass

import numpy as np

from .config import AppConfig
from .controllers import (BangBangController, DpBenchmarkController, MarkovPredictor,
                          SmpcController)
from .markov import TransitionMatrix
from .model import CabinModel
from .plant import clamp_command, electric_power, partial_load_ratio
from .simulate import Mission, RunMetrics, SimulationTrace, metrics, run
from .thermal import EnvironmentSample

log = logging.getLogger(__name__)

SWEEP_VARIABLES = ("speed", "solar", "ambient")
CONTROLLER_NAMES = ("bangbang", "dp", "smpc")
KMH_TO_MS = 1.0 / 3.6
SWEEP_DURATION_S = 1370  # one urban-cycle length of constant conditions


@dataclass(frozen=True)
class SweepSpec:
    """One sensitivity sweep: vary one condition, hold the others constant."""

    variable: str
    values: tuple
    targets: tuple = (20.0, 22.0, 24.0, 26.0)
    speed_kmh: float = 40.0
    ambient_c: float = 30.0
    solar_wm2: float = 900.0
    duration_s: int = SWEEP_DURATION_S

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise ValueError(f"swept variable must be one of {SWEEP_VARIABLES}")
        if not self.values:
            raise ValueError("sweep value list must not be empty")
        if not self.targets:
            raise ValueError("target temperature list must not be empty")
        object.__setattr__(self, "values", tuple(sorted(float(v) for v in self.values)))
        object.__setattr__(self, "targets", tuple(float(t) for t in self.targets))
        if self.duration_s <= 0:
            raise ValueError("sweep duration must be > 0")


@dataclass(frozen=True)
class SweepRow:
    variable: str
    value: float
    target_c: float
    hold_q_w: float
    power_w: float
    energy_j: float
    unreachable: bool


def run_sweep(spec: SweepSpec, model: CabinModel) -> list[SweepRow]:
    """Hold-the-target energies for every (swept value, target) pair, row-sorted."""
    rows = []
    for value in spec.values:
        speed = value if spec.variable == "speed" else spec.speed_kmh
        ambient = value if spec.variable == "ambient" else spec.ambient_c
        solar = value if spec.variable == "solar" else spec.solar_wm2
        env = EnvironmentSample(time_s=0.0, ambient_c=ambient, solar_wm2=solar,
                                air_speed_ms=speed * KMH_TO_MS)
        for target in spec.targets:
            load = model.equilibrium_load(env, target)
            q = float(np.clip(load, model.limits.q_cool_min_w, model.limits.q_cool_max_w))
            unreachable = not np.isclose(q, load, rtol=0, atol=1e-6)
            plr = partial_load_ratio(q, model.limits)
            power = electric_power(q, model.cop_map.cop(target, ambient, plr))
            rows.append(SweepRow(
                variable=spec.variable, value=value, target_c=target, hold_q_w=q,
                power_w=power, energy_j=power * spec.duration_s,
                unreachable=unreachable,
            ))
            if unreachable:
                log.warning("sweep %s=%g target %g degC: equilibrium load %.0f W "
                            "outside plant limits", spec.variable, value, target, load)
    return rows


@dataclass(frozen=True)
class ComparisonRow:
    mission: str
    controller: str
    metrics: RunMetrics
    error: str = ""


@dataclass(frozen=True)
class ComparisonResult:
    rows: tuple[ComparisonRow, ...]
    traces: dict  # (mission name, controller name) -> SimulationTrace


def build_controller(name: str, cfg: AppConfig, model: CabinModel, mission: Mission,
                      matrix: TransitionMatrix | None, seed):
    if name == "bangbang":
        return BangBangController(cfg.bangbang, model.limits)
    if name == "dp":
        return DpBenchmarkController(model, cfg.grid, cfg.cost,
                                     mission.disturbances(), mission.initial_state)
    if name == "smpc":
        if matrix is None:
            raise ValueError("the SMPC controller needs a fitted transition matrix")
        predictor = MarkovPredictor(matrix, mode=cfg.smpc_mode, seed=seed)
        return SmpcController(model, cfg.grid, cfg.cost, predictor,
                              cfg.smpc_horizon, mission.disturbances(),
                              terminal_tail_s=cfg.smpc_terminal_tail_s)
    raise ValueError(f"unknown controller {name!r}; expected one of {CONTROLLER_NAMES}")


def _run_single(task):
    """One (mission, controller) run; module-level so a process pool can fork it."""
    mission, name, cfg, matrix, seed = task
    model = cfg.model()
    controller = build_controller(name, cfg, model, mission, matrix, seed)
    return (mission.name, name), run(mission, controller, model, dt_s=cfg.sim.dt_s)


def run_comparison(missions: list[Mission], cfg: AppConfig,
                   controllers=CONTROLLER_NAMES,
                   matrix: TransitionMatrix | None = None,
                   seed=None, workers: int = 1) -> ComparisonResult:
    """Run every controller over every mission; savings are vs bang-bang.

    A failed run is reported in its row and does not abort the batch.  With
    ``workers`` > 1 the independent runs execute on a process pool; rows are
    assembled in mission/controller order either way, so the report does not
    depend on completion order.
    """
    for name in controllers:
        if name not in CONTROLLER_NAMES:
            raise ValueError(f"unknown controller {name!r}; expected one of {CONTROLLER_NAMES}")
    if "smpc" in controllers and matrix is None:
        raise ValueError("the SMPC controller needs a fitted transition matrix")
    skip = 0.0 if cfg.sim.include_pulldown_in_stats else _pulldown_skip_s(cfg)

    tasks = [(mission, name, cfg, matrix, seed)
             for mission in missions for name in controllers]
    traces: dict = {}
    errors: dict = {}
    if workers > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            futures = {pool.submit(_run_single, task): task for task in tasks}
            for fut in concurrent.futures.as_completed(futures):
                mission, name = futures[fut][0], futures[fut][1]
                try:
                    key, trace = fut.result()
                    traces[key] = trace
                except Exception as exc:
                    log.error("run %s/%s failed: %s", mission.name, name, exc)
                    errors[(mission.name, name)] = str(exc)
    else:
        for task in tasks:
            mission, name = task[0], task[1]
            try:
                key, trace = _run_single(task)
                traces[key] = trace
            except Exception as exc:  # keep the batch alive, report the row
                log.error("run %s/%s failed: %s", mission.name, name, exc)
                errors[(mission.name, name)] = str(exc)

    rows = []
    for mission in missions:
        baseline = traces.get((mission.name, "bangbang"))
        for name in controllers:
            if (mission.name, name) in errors:
                rows.append(ComparisonRow(mission=mission.name, controller=name,
                                          metrics=RunMetrics(np.nan, np.nan, np.nan),
                                          error=errors[(mission.name, name)]))
                continue
            trace = traces[(mission.name, name)]
            m = metrics(trace, baseline=None if name == "bangbang" else baseline,
                        skip_initial_s=skip)
            rows.append(ComparisonRow(mission=mission.name, controller=name, metrics=m))
    return ComparisonResult(rows=tuple(rows), traces=traces)


def _pulldown_skip_s(cfg: AppConfig) -> float:
    # Rough transient length: swing / slowest plausible pull-down rate.
    return 5.0 * abs(cfg.sim.initial_temp_c - cfg.cost.target_temp_c)


REPORT_HEADER = ("mission", "controller", "energy_x1e6_j", "saving_pct",
                 "mean_temp_c", "temp_std_c")


def report_table(result: ComparisonResult) -> str:
    """Aligned text table of the comparison; a pure function of the rows."""
    cells = [REPORT_HEADER]
    for row in result.rows:
        if row.error:
            cells.append((row.mission, row.controller, "failed", "-", "-", "-"))
            continue
        m = row.metrics
        saving = "-" if m.saving_vs_baseline is None else f"{100 * m.saving_vs_baseline:.2f}"
        cells.append((row.mission, row.controller, f"{m.total_energy_j / 1e6:.4f}",
                      saving, f"{m.mean_temp_c:.2f}", f"{m.temp_std_c:.2f}"))
    widths = [max(len(r[i]) for r in cells) for i in range(len(REPORT_HEADER))]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip()
             for r in cells]
    return "\n".join(lines) + "\n"


def report_csv(result: ComparisonResult) -> str:
    lines = [",".join(REPORT_HEADER)]
    for row in result.rows:
        if row.error:
            lines.append(f"{row.mission},{row.controller},nan,nan,nan,nan")
            continue
        m = row.metrics
        saving = "" if m.saving_vs_baseline is None else f"{100 * m.saving_vs_baseline:.4f}"
        lines.append(f"{row.mission},{row.controller},{m.total_energy_j / 1e6:.6f},"
                     f"{saving},{m.mean_temp_c:.4f},{m.temp_std_c:.4f}")
    return "\n".join(lines) + "\n"


def sweep_csv(rows: list[SweepRow]) -> str:
    lines = ["variable,value,target_c,hold_q_w,power_w,energy_j,unreachable"]
    for r in rows:
        lines.append(f"{r.variable},{r.value:g},{r.target_c:g},{r.hold_q_w:.3f},"
                     f"{r.power_w:.3f},{r.energy_j:.3f},{int(r.unreachable)}")
    return "\n".join(lines) + "\n"
