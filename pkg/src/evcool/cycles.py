"""Driving cycles: the in-memory type, synthetic generators and bundled assets.

Standard regulatory cycles (UDDS, HWFET, ...) are not redistributed here; the
package ships deterministic synthetic cycles with comparable stop-and-go
character instead (see ``scripts/convert_epa_cycle.py`` for pulling in the
real ones).  Cycles are km/h traces sampled at exactly 1 s.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources

import numpy as np


@dataclass(frozen=True)
class CycleFile:
    """A validated driving cycle: speeds in km/h at a fixed 1 s sampling."""

    times_s: np.ndarray
    speeds_kmh: np.ndarray
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "times_s", np.asarray(self.times_s, dtype=float))
        object.__setattr__(self, "speeds_kmh", np.asarray(self.speeds_kmh, dtype=float))
        if self.times_s.shape != self.speeds_kmh.shape or self.times_s.ndim != 1:
            raise ValueError("cycle time and speed arrays must be 1-D and equal length")
        if self.times_s.size and not np.allclose(np.diff(self.times_s), 1.0):
            raise ValueError("cycle must be sampled at exactly 1 s")
        if np.any(self.speeds_kmh < 0):
            raise ValueError("cycle speeds must be >= 0")

    def __len__(self):
        return self.times_s.size


_PROFILES = {
    # (cruise speed range km/h, idle seconds range, cruise seconds range)
    "urban": ((18.0, 62.0), (4, 35), (8, 45)),
    "suburban": ((35.0, 85.0), (2, 15), (15, 70)),
    "highway": ((62.0, 112.0), (0, 6), (30, 110)),
}


def _ramp(v_from: float, v_to: float, rate_kmh_s: float) -> np.ndarray:
    steps = max(int(abs(v_to - v_from) / rate_kmh_s), 1)
    return np.linspace(v_from, v_to, steps + 1)[1:]


def synthetic_cycle(kind: str, duration_s: int, seed: int, name: str = "") -> CycleFile:
    """Deterministic stop-and-go speed trace of the requested character."""
    if kind not in _PROFILES:
        raise ValueError(f"kind must be one of {sorted(_PROFILES)}")
    (v_lo, v_hi), idle_rng, cruise_rng = _PROFILES[kind]
    rng = np.random.default_rng(seed)
    speeds = [0.0]
    while len(speeds) < duration_s + 1:
        speeds.extend([0.0] * int(rng.integers(idle_rng[0], idle_rng[1] + 1)))
        target = float(rng.uniform(v_lo, v_hi))
        speeds.extend(_ramp(speeds[-1], target, float(rng.uniform(1.2, 2.6))))
        jitter = rng.normal(0.0, 1.2, int(rng.integers(cruise_rng[0], cruise_rng[1] + 1)))
        speeds.extend(np.clip(target + np.cumsum(jitter) * 0.3, 0.0, 120.0))
        if rng.uniform() < (0.85 if kind == "urban" else 0.5):
            speeds.extend(_ramp(speeds[-1], 0.0, float(rng.uniform(1.5, 3.0))))
    arr = np.clip(np.asarray(speeds[: duration_s + 1]), 0.0, 120.0)
    arr[-1] = 0.0
    return CycleFile(np.arange(arr.size, dtype=float), arr,
                     name=name or f"synthetic-{kind}-{seed}")


def builtin_cycle(name: str) -> CycleFile:
    """Load one of the bundled cycle assets by bare name (no extension)."""
    from .io import load_cycle  # deferred to avoid an import cycle

    ref = resources.files("evcool").joinpath(f"data/cycles/{name}.csv")
    if not ref.is_file():
        raise FileNotFoundError(f"no bundled cycle named {name!r}; "
                                f"available: {', '.join(list_builtin_cycles())}")
    with resources.as_file(ref) as path:
        return load_cycle(path)


def list_builtin_cycles() -> list[str]:
    files = resources.files("evcool").joinpath("data/cycles")
    return sorted(p.name[:-4] for p in files.iterdir() if p.name.endswith(".csv"))
