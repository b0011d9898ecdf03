"""File formats: driving-cycle CSV, environment CSV, transition-matrix JSON,
simulation-trace CSV.

Cycle CSV      header ``time_s,speed_kmh``; strict 1 s sampling, speeds >= 0.
Environment CSV header ``time_s,ambient_c,solar_wm2``; nondecreasing time; a
               single data row means constant conditions for a whole mission.
Matrix JSON    quantizer metadata plus dense row-major transition counts and
               probabilities.
Trace CSV      the documented simulation-trace columns (units in the names).

Loaders refuse malformed input with the offending row number; nothing
partially loaded ever reaches a simulation.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .cycles import CycleFile
from .markov import TransitionMatrix
from .simulate import TRACE_COLUMNS, SimulationTrace

CYCLE_HEADER = ["time_s", "speed_kmh"]
ENV_HEADER = ["time_s", "ambient_c", "solar_wm2"]


class FileFormatError(ValueError):
    """Malformed input file; the message carries the file and row number."""


def _read_rows(path, expected_header):
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise FileFormatError(f"{path}: file is empty") from None
        if [h.strip() for h in header] != expected_header:
            raise FileFormatError(
                f"{path}: row 1: expected header {','.join(expected_header)!r}, "
                f"got {','.join(header)!r}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(expected_header):
                raise FileFormatError(f"{path}: row {lineno}: expected "
                                      f"{len(expected_header)} fields, got {len(row)}")
            try:
                rows.append(([float(cell) for cell in row], lineno))
            except ValueError:
                raise FileFormatError(f"{path}: row {lineno}: non-numeric value") from None
    return path, rows


def load_cycle(path) -> CycleFile:
    """Read and validate a driving-cycle CSV."""
    path, rows = _read_rows(path, CYCLE_HEADER)
    if not rows:
        raise FileFormatError(f"{path}: no data rows")
    times = np.array([r[0][0] for r in rows])
    speeds = np.array([r[0][1] for r in rows])
    for i in range(1, len(rows)):
        if times[i] == times[i - 1]:
            raise FileFormatError(f"{path}: row {rows[i][1]}: duplicate timestamp {times[i]:g}")
        if abs(times[i] - times[i - 1] - 1.0) > 1e-9:
            raise FileFormatError(f"{path}: row {rows[i][1]}: sampling step is "
                                  f"{times[i] - times[i - 1]:g} s, expected exactly 1 s")
    for (values, lineno) in rows:
        if values[1] < 0:
            raise FileFormatError(f"{path}: row {lineno}: negative speed {values[1]:g}")
    return CycleFile(times, speeds, name=path.stem)


@dataclass(frozen=True)
class EnvironmentFile:
    """Ambient/solar series; a single row is the constant-conditions shorthand."""

    times_s: np.ndarray
    ambient_c: np.ndarray
    solar_wm2: np.ndarray
    name: str = ""

    def __len__(self):
        return self.times_s.size

    def resample(self, times_s: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Sample-and-hold the series onto mission timestamps."""
        if len(self) == 1:
            n = np.asarray(times_s).size
            return (np.full(n, self.ambient_c[0]), np.full(n, self.solar_wm2[0]))
        idx = np.clip(np.searchsorted(self.times_s, times_s, side="right") - 1,
                      0, len(self) - 1)
        return self.ambient_c[idx], self.solar_wm2[idx]


def load_environment(path) -> EnvironmentFile:
    """Read and validate an environment CSV."""
    path, rows = _read_rows(path, ENV_HEADER)
    if not rows:
        raise FileFormatError(f"{path}: no data rows")
    times = np.array([r[0][0] for r in rows])
    ambient = np.array([r[0][1] for r in rows])
    solar = np.array([r[0][2] for r in rows])
    for i in range(1, len(rows)):
        if times[i] < times[i - 1]:
            raise FileFormatError(f"{path}: row {rows[i][1]}: time goes backwards")
    for (values, lineno) in rows:
        if values[2] < 0:
            raise FileFormatError(f"{path}: row {lineno}: negative solar flux")
    return EnvironmentFile(times, ambient, solar, name=path.stem)


def save_matrix(matrix: TransitionMatrix, path, extra: dict | None = None) -> None:
    """Write a fitted transition matrix as portable JSON."""
    payload = matrix.to_dict()
    if extra:
        payload["metadata"] = extra
    Path(path).write_text(json.dumps(payload, indent=1))


def load_matrix(path) -> TransitionMatrix:
    payload = json.loads(Path(path).read_text())
    return TransitionMatrix.from_dict(payload)


def load_matrix_metadata(path) -> dict:
    return json.loads(Path(path).read_text()).get("metadata", {})


def write_policy_csv(policy, path, stages=None) -> None:
    """Debug dump of a DP policy: one row per (stage, temp node, capacity node).

    ``stages`` restricts the dump to an iterable of stage indices; full-mission
    policies are large (stages x temp nodes x capacity nodes rows).
    """
    grid = policy.grid
    stage_range = range(policy.commands.shape[0]) if stages is None else stages
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["stage", "temp_c", "q_prev_w", "command_w"])
        for k in stage_range:
            for i, t in enumerate(grid.temp_axis):
                for j, q in enumerate(grid.q_axis):
                    cmd = policy.commands[k, i, j]
                    writer.writerow([k, f"{t:g}", f"{q:g}",
                                     "pruned" if cmd < 0 else f"{grid.q_axis[cmd]:g}"])


def write_trace_csv(trace: SimulationTrace, path) -> None:
    """Dump a simulation trace with the documented column header."""
    cols = trace.columns()
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACE_COLUMNS)
        for k in range(len(trace)):
            writer.writerow([f"{cols[name][k]:.6g}" for name in TRACE_COLUMNS])


def read_trace_csv(path) -> SimulationTrace:
    path, rows = _read_rows(path, list(TRACE_COLUMNS))
    data = np.array([r[0] for r in rows]) if rows else np.empty((0, len(TRACE_COLUMNS)))
    cols = {name: data[:, i] for i, name in enumerate(TRACE_COLUMNS)}
    return SimulationTrace(
        times_s=cols["time_s"], speeds_kmh=cols["speed_kmh"], ambient_c=cols["ambient_c"],
        solar_wm2=cols["solar_wm2"], t_in_c=cols["t_in_c"], q_cool_w=cols["q_cool_w"],
        p_ac_w=cols["p_ac_w"], cop=cols["cop"], q_conduction_w=cols["q_conduction_w"],
        q_radiation_w=cols["q_radiation_w"], q_occupants_w=cols["q_occupants_w"],
        q_ventilation_w=cols["q_ventilation_w"], cum_energy_j=cols["cum_energy_j"],
    )
