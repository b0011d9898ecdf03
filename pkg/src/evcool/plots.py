"""Figure rendering for the CLI report paths (written to files, never shown)."""

from __future__ import annotations

from collections import defaultdict

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .experiments import ComparisonResult, SweepRow
from .markov import DensityGrid
from .simulate import SimulationTrace


def save_trace_figure(trace: SimulationTrace, path, band=None) -> None:
    """Cabin temperature, cooling capacity and electric power over the mission."""
    fig, axes = plt.subplots(3, 1, sharex=True, figsize=(9, 7))
    axes[0].plot(trace.times_s, trace.t_in_c, lw=1.0)
    if band is not None:
        for edge in band:
            axes[0].axhline(edge, color="gray", ls="--", lw=0.8)
    axes[0].set_ylabel("cabin temp (degC)")
    axes[1].plot(trace.times_s, trace.q_cool_w, lw=1.0, color="tab:orange")
    axes[1].set_ylabel("Q_cool (W)")
    axes[2].plot(trace.times_s, trace.p_ac_w, lw=1.0, color="tab:green")
    axes[2].set_ylabel("P_AC (W)")
    axes[2].set_xlabel("time (s)")
    fig.suptitle(f"{trace.notes.get('mission', '')} / {trace.notes.get('controller', '')}")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def save_sweep_figure(rows: list[SweepRow], path) -> None:
    """Energy vs the swept value, one line per target temperature."""
    by_target = defaultdict(list)
    for r in rows:
        by_target[r.target_c].append(r)
    fig, ax = plt.subplots(figsize=(7, 5))
    for target, items in sorted(by_target.items()):
        items.sort(key=lambda r: r.value)
        values = [r.value for r in items]
        energy = [r.energy_j / 1e6 for r in items]
        ax.plot(values, energy, marker="o", ms=3, label=f"target {target:g} degC")
        for r in items:
            if r.unreachable:
                ax.plot([r.value], [r.energy_j / 1e6], "rx", ms=8)
    variable = rows[0].variable if rows else ""
    units = {"speed": "km/h", "solar": "W/m^2", "ambient": "degC"}.get(variable, "")
    ax.set_xlabel(f"{variable} ({units})")
    ax.set_ylabel("energy (MJ)")
    ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def save_comparison_figure(result: ComparisonResult, path) -> None:
    """Grouped bars of energy and temperature spread per mission/controller."""
    missions = list(dict.fromkeys(r.mission for r in result.rows))
    controllers = list(dict.fromkeys(r.controller for r in result.rows))
    lookup = {(r.mission, r.controller): r.metrics for r in result.rows if not r.error}
    x = np.arange(len(missions))
    width = 0.8 / max(len(controllers), 1)
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 4.5))
    def cell(mission, name, attr):
        met = lookup.get((mission, name))
        return getattr(met, attr) if met is not None else np.nan

    for i, name in enumerate(controllers):
        energy = [cell(m, name, "total_energy_j") / 1e6 for m in missions]
        spread = [cell(m, name, "temp_std_c") for m in missions]
        offs = x + (i - (len(controllers) - 1) / 2) * width
        ax1.bar(offs, energy, width, label=name)
        ax2.bar(offs, spread, width, label=name)
    for ax, label in ((ax1, "energy (MJ)"), (ax2, "temp std (degC)")):
        ax.set_xticks(x)
        ax.set_xticklabels(missions, rotation=20, ha="right")
        ax.set_ylabel(label)
        ax.grid(axis="y", alpha=0.3)
    ax1.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def save_prediction_figure(times_s, actual_kmh, predictions, path, stride: int = 60) -> None:
    """Actual speed trace with predicted horizon snippets overlaid every ``stride`` steps."""
    fig, ax = plt.subplots(figsize=(9, 4.5))
    ax.plot(times_s, actual_kmh, lw=1.0, color="black", label="actual")
    labeled = False
    for k, speeds in predictions:
        if k % stride:
            continue
        t = np.arange(k + 1, k + 1 + len(speeds), dtype=float)
        ax.plot(t, speeds, lw=1.0, color="tab:red", alpha=0.7,
                label=None if labeled else "predicted")
        labeled = True
    ax.set_xlabel("time (s)")
    ax.set_ylabel("speed (km/h)")
    ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def save_density_figure(grid: DensityGrid, path) -> None:
    """Speed/acceleration joint density heat map."""
    fig, ax = plt.subplots(figsize=(7, 5))
    mesh = ax.pcolormesh(grid.speed_edges_kmh, grid.accel_edges_kmh_s,
                         grid.density.T, cmap="Reds")
    fig.colorbar(mesh, ax=ax, label="probability mass")
    ax.set_xlabel("speed (km/h)")
    ax.set_ylabel("acceleration ((km/h)/s)")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
