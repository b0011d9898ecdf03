"""Markov-chain velocity predictor.

Speeds are quantized into uniform bins; one-step transition probabilities are
counted from a corpus of driving cycles sampled at 1 s.  Multi-step
predictions chain single-step predictions, feeding each predicted state back
as the next initial state.  Rows never observed in training fall back to
persistence (hold the current state) and are flagged so the controller can
tell oracle speeds from guesses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

PREDICTION_MODES = ("argmax", "expectation", "sample")


@dataclass(frozen=True)
class VelocityQuantizer:
    """Uniform speed bins over [0, v_max] km/h."""

    bin_width_kmh: float = 2.0
    v_max_kmh: float = 120.0

    def __post_init__(self):
        if self.bin_width_kmh <= 0:
            raise ValueError("bin width must be > 0")
        if self.v_max_kmh <= 0:
            raise ValueError("v_max must be > 0")

    @property
    def num_states(self) -> int:
        return int(math.ceil(self.v_max_kmh / self.bin_width_kmh))

    def quantize(self, speed_kmh):
        """State index for a speed; speeds above v_max saturate to the top bin."""
        v = np.asarray(speed_kmh, dtype=float)
        if np.any(v < 0):
            raise ValueError("speed must be >= 0")
        idx = np.minimum(np.floor(v / self.bin_width_kmh).astype(int), self.num_states - 1)
        return int(idx) if idx.ndim == 0 else idx

    def dequantize(self, state):
        """Bin midpoint speed for a state index."""
        idx = np.asarray(state)
        if np.any(idx < 0) or np.any(idx >= self.num_states):
            raise ValueError("state index out of range")
        out = (idx + 0.5) * self.bin_width_kmh
        return float(out) if out.ndim == 0 else out


class TransitionMatrix:
    """Row-stochastic one-step transition matrix over quantized speed states."""

    def __init__(self, counts: np.ndarray, quantizer: VelocityQuantizer):
        counts = np.asarray(counts, dtype=np.int64)
        p = quantizer.num_states
        if counts.shape != (p, p):
            raise ValueError(f"counts must be {p}x{p}")
        if np.any(counts < 0):
            raise ValueError("counts must be >= 0")
        self.counts = counts
        self.quantizer = quantizer
        self.row_totals = counts.sum(axis=1)
        with np.errstate(invalid="ignore"):
            self.probs = np.where(self.row_totals[:, None] > 0,
                                  counts / np.maximum(self.row_totals[:, None], 1), 0.0)

    @property
    def num_states(self) -> int:
        return self.quantizer.num_states

    def row(self, state: int) -> np.ndarray:
        return self.probs[state]

    def has_data(self, state: int) -> bool:
        return self.row_totals[state] > 0

    def to_dict(self) -> dict:
        return {
            "bin_width_kmh": self.quantizer.bin_width_kmh,
            "v_max_kmh": self.quantizer.v_max_kmh,
            "num_states": self.num_states,
            "counts": self.counts.tolist(),
            "probs": self.probs.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TransitionMatrix":
        q = VelocityQuantizer(d["bin_width_kmh"], d["v_max_kmh"])
        return cls(np.asarray(d["counts"]), q)


@dataclass(frozen=True)
class Prediction:
    """Predicted speeds plus per-step persistence-fallback flags."""

    speeds_kmh: np.ndarray
    fallback: np.ndarray  # bool per step

    def __len__(self):
        return self.speeds_kmh.size


def fit(cycles, quantizer: VelocityQuantizer = VelocityQuantizer()) -> TransitionMatrix:
    """Count consecutive-sample transitions pooled over a cycle corpus.

    ``cycles`` is an iterable of km/h speed arrays sampled at 1 s.  No
    transition is counted across cycle boundaries.  At least one cycle with
    two or more samples is required.
    """
    p = quantizer.num_states
    counts = np.zeros((p, p), dtype=np.int64)
    usable = 0
    for cycle in cycles:
        speeds = np.asarray(getattr(cycle, "speeds_kmh", cycle), dtype=float)
        if speeds.ndim != 1:
            raise ValueError("each cycle must be a 1-D speed trace")
        if speeds.size < 2:
            continue
        states = quantizer.quantize(speeds)
        np.add.at(counts, (states[:-1], states[1:]), 1)
        usable += 1
    if usable == 0:
        raise ValueError("corpus must contain at least one cycle with >= 2 samples")
    return TransitionMatrix(counts, quantizer)


def _next_state(matrix: TransitionMatrix, state: int, mode: str, rng) -> tuple[int, bool]:
    if not matrix.has_data(state):
        return state, True  # persistence fallback
    row = matrix.row(state)
    if mode == "argmax":
        return int(np.argmax(row)), False  # ties resolve to the lowest index
    if mode == "expectation":
        mids = matrix.quantizer.dequantize(np.arange(matrix.num_states))
        return matrix.quantizer.quantize(float(row @ mids)), False
    if mode == "sample":
        return int(rng.choice(matrix.num_states, p=row)), False
    raise ValueError(f"unknown prediction mode {mode!r}")


def predict(matrix: TransitionMatrix, current_speed_kmh: float, horizon: int,
            mode: str = "argmax", rng=None, seed=None) -> Prediction:
    """Chain one-step predictions over ``horizon`` steps.

    Each predicted state becomes the initial state of the next step.  Returns
    dequantized bin-midpoint speeds.  ``sample`` mode draws from the row
    distribution using ``rng`` (or a fresh generator from ``seed``).
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    if mode not in PREDICTION_MODES:
        raise ValueError(f"mode must be one of {PREDICTION_MODES}")
    if mode == "sample" and rng is None:
        rng = np.random.default_rng(seed)
    state = matrix.quantizer.quantize(current_speed_kmh)
    speeds = np.empty(horizon)
    flags = np.zeros(horizon, dtype=bool)
    for k in range(horizon):
        state, fell_back = _next_state(matrix, state, mode, rng)
        speeds[k] = matrix.quantizer.dequantize(state)
        flags[k] = fell_back
    return Prediction(speeds_kmh=speeds, fallback=flags)


@dataclass(frozen=True)
class DensityGrid:
    """Normalized joint histogram over (speed, acceleration)."""

    density: np.ndarray
    speed_edges_kmh: np.ndarray
    accel_edges_kmh_s: np.ndarray


def vel_accel_density(cycles, speed_bin_kmh: float = 2.0, v_max_kmh: float = 120.0,
                      accel_bin_kmh_s: float = 0.25,
                      accel_max_kmh_s: float = 5.0) -> DensityGrid:
    """Joint (speed, acceleration) histogram over 1 s sampled cycles, summing to 1."""
    v_edges = np.arange(0.0, v_max_kmh + speed_bin_kmh, speed_bin_kmh)
    a_edges = np.arange(-accel_max_kmh_s, accel_max_kmh_s + accel_bin_kmh_s, accel_bin_kmh_s)
    hist = np.zeros((v_edges.size - 1, a_edges.size - 1))
    total = 0
    for cycle in cycles:
        speeds = np.asarray(getattr(cycle, "speeds_kmh", cycle), dtype=float)
        if speeds.size < 2:
            continue
        v = np.clip(speeds[:-1], v_edges[0], v_edges[-1] - 1e-9)
        a = np.clip(np.diff(speeds), a_edges[0], a_edges[-1] - 1e-9)
        h, _, _ = np.histogram2d(v, a, bins=(v_edges, a_edges))
        hist += h
        total += v.size
    if total == 0:
        raise ValueError("corpus must contain at least one cycle with >= 2 samples")
    return DensityGrid(density=hist / total, speed_edges_kmh=v_edges, accel_edges_kmh_s=a_edges)
