"""Command line interface.

Subcommands: fit-markov, predict, simulate, sweep, compare, density.
Delimited output goes to --out; --plot renders a PNG figure next to it.
Cycle arguments accept file paths or bundled cycle names (see
``evcool.cycles.list_builtin_cycles``).
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

import numpy as np

from . import experiments, io, plots
from .config import load_config
from .cycles import builtin_cycle, list_builtin_cycles
from .markov import VelocityQuantizer, fit, predict, vel_accel_density
from .simulate import Mission, metrics as run_metrics, run, scale_cycle

DEFAULT_AMBIENT_C = 33.0
DEFAULT_SOLAR_WM2 = 830.0


def _resolve_cycle(token: str):
    path = Path(token)
    if path.exists():
        return io.load_cycle(path)
    try:
        return builtin_cycle(token)
    except FileNotFoundError:
        raise FileNotFoundError(
            f"{token!r} is neither a file nor a bundled cycle "
            f"(bundled: {', '.join(list_builtin_cycles())})") from None


def _floats(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _mission_env(args, n_cycle_times):
    if args.env:
        env = io.load_environment(args.env)
        return env.resample(n_cycle_times)
    return (np.full(n_cycle_times.size, args.ambient),
            np.full(n_cycle_times.size, args.solar))


def _add_env_options(p):
    p.add_argument("--env", help="environment CSV (time_s,ambient_c,solar_wm2); "
                                 "a single row means constant conditions")
    p.add_argument("--ambient", type=float, default=DEFAULT_AMBIENT_C,
                   help="constant ambient degC when no --env (default %(default)s)")
    p.add_argument("--solar", type=float, default=DEFAULT_SOLAR_WM2,
                   help="constant solar flux W/m^2 when no --env (default %(default)s)")


def cmd_fit_markov(args) -> int:
    cycles = [_resolve_cycle(tok) for tok in args.cycles]
    holdout_names: list[str] = []
    if args.holdout:
        if args.holdout >= len(cycles):
            raise ValueError("--holdout must leave at least one training cycle")
        rng = np.random.default_rng(args.seed)
        picks = rng.choice(len(cycles), size=args.holdout, replace=False)
        holdout_names = [cycles[i].name for i in sorted(picks)]
        cycles = [c for i, c in enumerate(cycles) if i not in set(picks.tolist())]
    quantizer = VelocityQuantizer(bin_width_kmh=args.bin_width, v_max_kmh=args.v_max)
    matrix = fit(cycles, quantizer)
    io.save_matrix(matrix, args.out, extra={
        "train_cycles": [c.name for c in cycles],
        "holdout_cycles": holdout_names,
    })
    visited = int(np.count_nonzero(matrix.row_totals))
    print(f"fitted {matrix.num_states}x{matrix.num_states} matrix from "
          f"{len(cycles)} cycles ({visited} states visited) -> {args.out}")
    if holdout_names:
        print("holdout:", ", ".join(holdout_names))
    return 0


def cmd_predict(args) -> int:
    matrix = io.load_matrix(args.matrix)
    cycle = _resolve_cycle(args.cycle)
    rng = np.random.default_rng(args.seed)
    speeds = cycle.speeds_kmh
    records = []
    with Path(args.out).open("w") as fh:
        fh.write("step,offset_s,predicted_kmh,actual_kmh,fallback\n")
        for k in range(len(cycle) - 1):
            pred = predict(matrix, float(speeds[k]), args.horizon, mode=args.mode, rng=rng)
            records.append((k, pred.speeds_kmh))
            for offset in range(args.horizon):
                actual = speeds[k + 1 + offset] if k + 1 + offset < len(cycle) else np.nan
                fh.write(f"{k},{offset + 1},{pred.speeds_kmh[offset]:.3f},"
                         f"{actual:.3f},{int(pred.fallback[offset])}\n")
    print(f"wrote {len(records)} prediction horizons -> {args.out}")
    if args.plot:
        fig = Path(args.out).with_suffix(".png")
        plots.save_prediction_figure(cycle.times_s, speeds, records, fig)
        print(f"figure -> {fig}")
    return 0


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    model = cfg.model()
    cycle = _resolve_cycle(args.cycle)
    if args.scale and args.scale != [1.0]:
        cycle = scale_cycle(cycle, args.scale[0])
    ambient, solar = _mission_env(args, cycle.times_s)
    mission = Mission(times_s=cycle.times_s, speeds_kmh=cycle.speeds_kmh,
                      ambient_c=ambient, solar_wm2=solar,
                      initial_temp_c=args.t0 if args.t0 is not None else cfg.sim.initial_temp_c,
                      initial_q_w=cfg.sim.initial_q_w, name=cycle.name)
    matrix = io.load_matrix(args.matrix) if args.matrix else None
    if args.horizon:
        cfg = dataclasses.replace(cfg, smpc_horizon=args.horizon)
    controller = experiments.build_controller(args.controller, cfg, model, mission,
                                              matrix, args.seed)
    trace = run(mission, controller, model, dt_s=cfg.sim.dt_s)
    io.write_trace_csv(trace, args.out)
    m = run_metrics(trace)
    print(f"{mission.name} / {args.controller}: energy {m.total_energy_j / 1e6:.4f} MJ, "
          f"mean temp {m.mean_temp_c:.2f} degC, std {m.temp_std_c:.2f} degC -> {args.out}")
    if args.plot:
        fig = Path(args.out).with_suffix(".png")
        band = (cfg.bangbang.t_low_c, cfg.bangbang.t_high_c) \
            if args.controller == "bangbang" else None
        plots.save_trace_figure(trace, fig, band=band)
        print(f"figure -> {fig}")
    return 0


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    spec = experiments.SweepSpec(
        variable=args.var, values=tuple(args.values), targets=tuple(args.targets),
        speed_kmh=args.speed, ambient_c=args.ambient, solar_wm2=args.solar,
        duration_s=args.duration)
    rows = experiments.run_sweep(spec, cfg.model())
    Path(args.out).write_text(experiments.sweep_csv(rows))
    flagged = sum(r.unreachable for r in rows)
    print(f"swept {args.var} over {len(spec.values)} values x {len(spec.targets)} targets "
          f"({flagged} unreachable rows) -> {args.out}")
    if args.plot:
        fig = Path(args.out).with_suffix(".png")
        plots.save_sweep_figure(rows, fig)
        print(f"figure -> {fig}")
    return 0


def cmd_compare(args) -> int:
    cfg = load_config(args.config)
    tokens = list(args.cycles)
    if args.from_holdout:
        meta = io.load_matrix_metadata(args.from_holdout)
        tokens += meta.get("holdout_cycles", [])
    if not tokens:
        raise ValueError("no cycles given (use positional cycles or --from-holdout)")
    cycles = [_resolve_cycle(tok) for tok in tokens]
    scales = args.scale or [1.0]
    if len(scales) == 1:
        scales = scales * len(cycles)
    if len(scales) != len(cycles):
        raise ValueError("--scale must be given once or once per cycle")
    missions = []
    for cyc, factor in zip(cycles, scales):
        if factor != 1.0:
            cyc = scale_cycle(cyc, factor)
        ambient, solar = _mission_env(args, cyc.times_s)
        missions.append(Mission(times_s=cyc.times_s, speeds_kmh=cyc.speeds_kmh,
                                ambient_c=ambient, solar_wm2=solar,
                                initial_temp_c=cfg.sim.initial_temp_c,
                                initial_q_w=cfg.sim.initial_q_w, name=cyc.name))
    controllers = tuple(args.controllers.split(","))
    matrix = io.load_matrix(args.matrix) if args.matrix else None
    result = experiments.run_comparison(missions, cfg, controllers=controllers,
                                        matrix=matrix, seed=args.seed,
                                        workers=args.workers)
    Path(args.out).write_text(experiments.report_csv(result))
    print(experiments.report_table(result), end="")
    print(f"report -> {args.out}")
    if args.plot:
        fig = Path(args.out).with_suffix(".png")
        plots.save_comparison_figure(result, fig)
        print(f"figure -> {fig}")
    failed = [r for r in result.rows if r.error]
    return 1 if failed else 0


def cmd_density(args) -> int:
    cycles = [_resolve_cycle(tok) for tok in args.cycles]
    grid = vel_accel_density(cycles)
    v_mid = 0.5 * (grid.speed_edges_kmh[:-1] + grid.speed_edges_kmh[1:])
    a_mid = 0.5 * (grid.accel_edges_kmh_s[:-1] + grid.accel_edges_kmh_s[1:])
    with Path(args.out).open("w") as fh:
        fh.write("speed_kmh,accel_kmh_s,density\n")
        for i, v in enumerate(v_mid):
            for j, a in enumerate(a_mid):
                if grid.density[i, j] > 0:
                    fh.write(f"{v:g},{a:g},{grid.density[i, j]:.9g}\n")
    print(f"density over {len(cycles)} cycles (mass {grid.density.sum():.6f}) -> {args.out}")
    if args.plot:
        fig = Path(args.out).with_suffix(".png")
        plots.save_density_figure(grid, fig)
        print(f"figure -> {fig}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="evcool",
        description="EV cabin AC simulation and controller benchmarking")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit-markov", help="fit a speed transition matrix from cycles")
    p.add_argument("--cycles", nargs="+", required=True, metavar="CYCLE")
    p.add_argument("--bin-width", type=float, default=2.0)
    p.add_argument("--v-max", type=float, default=120.0)
    p.add_argument("--holdout", type=int, default=0,
                   help="reserve N randomly chosen cycles for testing")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_fit_markov)

    p = sub.add_parser("predict", help="horizon speed predictions along a cycle")
    p.add_argument("--matrix", required=True)
    p.add_argument("--cycle", required=True)
    p.add_argument("--horizon", type=int, default=5)
    p.add_argument("--mode", choices=("argmax", "expectation", "sample"), default="argmax")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--plot", action="store_true")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("simulate", help="closed-loop run of one controller on one mission")
    p.add_argument("--cycle", required=True)
    _add_env_options(p)
    p.add_argument("--config")
    p.add_argument("--controller", choices=("bangbang", "dp", "smpc"), required=True)
    p.add_argument("--matrix", help="transition matrix JSON (needed for smpc)")
    p.add_argument("--horizon", type=int, default=0, help="override the SMPC horizon")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--scale", type=float, action="append",
                   help="speed scale factor for the cycle")
    p.add_argument("--t0", type=float, default=None, help="initial cabin temperature degC")
    p.add_argument("--out", required=True)
    p.add_argument("--plot", action="store_true")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="sensitivity sweep holding the cabin at targets")
    p.add_argument("--var", choices=experiments.SWEEP_VARIABLES, required=True)
    p.add_argument("--values", type=_floats, required=True,
                   help="comma-separated swept values")
    p.add_argument("--targets", type=_floats, default=[20.0, 22.0, 24.0, 26.0],
                   help="comma-separated target temperatures degC")
    p.add_argument("--speed", type=float, default=40.0, help="held speed km/h")
    p.add_argument("--ambient", type=float, default=30.0, help="held ambient degC")
    p.add_argument("--solar", type=float, default=900.0, help="held solar W/m^2")
    p.add_argument("--duration", type=int, default=experiments.SWEEP_DURATION_S)
    p.add_argument("--config")
    p.add_argument("--out", required=True)
    p.add_argument("--plot", action="store_true")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("compare", help="controller comparison table over missions")
    p.add_argument("cycles", nargs="*", metavar="CYCLE")
    p.add_argument("--from-holdout", help="matrix JSON whose holdout cycles to use")
    p.add_argument("--scale", type=float, action="append",
                   help="speed scale factor (once, or once per cycle)")
    _add_env_options(p)
    p.add_argument("--config")
    p.add_argument("--controllers", default="bangbang,dp,smpc")
    p.add_argument("--matrix", help="transition matrix JSON (needed for smpc)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=1,
                   help="process pool size for the independent runs")
    p.add_argument("--out", required=True)
    p.add_argument("--plot", action="store_true")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("density", help="speed/acceleration density of a cycle corpus")
    p.add_argument("--cycles", nargs="+", required=True, metavar="CYCLE")
    p.add_argument("--out", required=True)
    p.add_argument("--plot", action="store_true")
    p.set_defaults(func=cmd_density)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "values", None) is not None and not args.values:
        parser.error("--values must not be empty")
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
