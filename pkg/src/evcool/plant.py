"""AC plant model: COP lookup, electric power, compressor speed, command limits.

Electric power is P = Q_cool / COP.  The COP factorizes into a bilinear base
table over (cabin temperature, ambient temperature) and a one-dimensional
partial-load-ratio multiplier; both tables ship in the configuration file.
Physical limits: capacity bounds, a slew limit on the cooling capacity
(500 W/s by default) and the compressor speed range, realized as a linear
map over the partial load ratio.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PlantLimits:
    """Actuator limits of the AC plant."""

    q_cool_min_w: float = 0.0
    q_cool_max_w: float = 6800.0
    rate_limit_w_per_s: float = 500.0
    compressor_speed_min_rpm: float = 1500.0
    compressor_speed_max_rpm: float = 6500.0
    nominal_capacity_w: float = 6800.0

    def __post_init__(self):
        if not 0.0 <= self.q_cool_min_w < self.q_cool_max_w <= self.nominal_capacity_w:
            raise ValueError("need 0 <= q_min < q_max <= nominal capacity")
        if self.rate_limit_w_per_s <= 0:
            raise ValueError("rate limit must be > 0")
        if self.compressor_speed_min_rpm >= self.compressor_speed_max_rpm:
            raise ValueError("compressor speed range is empty")


class CopMap:
    """Tabulated coefficient of performance.

    base_grid[i, j] holds the COP at cabin temperature cabin_axis[i] and
    ambient temperature ambient_axis[j] (bilinear interpolation); plr_factor
    is a multiplier over the partial load ratio (linear interpolation).
    Queries outside the tables clamp to the edges (warned once per map).
    """

    def __init__(self, cabin_axis, ambient_axis, base_grid, plr_axis, plr_factor):
        self.cabin_axis = np.asarray(cabin_axis, dtype=float)
        self.ambient_axis = np.asarray(ambient_axis, dtype=float)
        self.base_grid = np.asarray(base_grid, dtype=float)
        self.plr_axis = np.asarray(plr_axis, dtype=float)
        self.plr_factor = np.asarray(plr_factor, dtype=float)
        self._clamp_warned = False
        self._validate()

    def _validate(self):
        for name, axis in (("cabin_axis", self.cabin_axis),
                           ("ambient_axis", self.ambient_axis),
                           ("plr_axis", self.plr_axis)):
            if axis.ndim != 1 or axis.size < 2 or np.any(np.diff(axis) <= 0):
                raise ValueError(f"{name} must be a strictly increasing vector")
        if self.base_grid.shape != (self.cabin_axis.size, self.ambient_axis.size):
            raise ValueError("base_grid shape must be (len(cabin_axis), len(ambient_axis))")
        if self.plr_factor.shape != self.plr_axis.shape:
            raise ValueError("plr_factor must match plr_axis")
        if np.any(self.base_grid <= 0) or np.any(self.plr_factor <= 0):
            raise ValueError("all COP table values must be > 0")
        if np.any(np.diff(self.base_grid, axis=1) > 0):
            raise ValueError("base COP must be nonincreasing along rising ambient temperature")
        if np.any(np.diff(self.base_grid, axis=0) < 0):
            raise ValueError("base COP must be nondecreasing along rising cabin temperature")
        # The multiplier is expected to be nearly flat over the 0.4..0.8 band.
        band = self.plr_multiplier(np.linspace(0.4, 0.8, 41))
        if (band.max() - band.min()) / band.max() > 0.05:
            raise ValueError("plr_factor varies more than 5% over PLR in [0.4, 0.8]")

    def _clamped(self, values, axis, label):
        lo, hi = axis[0], axis[-1]
        arr = np.asarray(values, dtype=float)
        if np.any(arr < lo) or np.any(arr > hi):
            if not self._clamp_warned:
                log.warning("COP query outside table on %s axis; clamping to [%g, %g]",
                            label, lo, hi)
                self._clamp_warned = True
            arr = np.clip(arr, lo, hi)
        return arr

    def base(self, t_in, t_out):
        """Bilinear base COP at cabin temperature t_in and ambient t_out."""
        ti = self._clamped(t_in, self.cabin_axis, "cabin")
        to = self._clamped(t_out, self.ambient_axis, "ambient")
        i = np.clip(np.searchsorted(self.cabin_axis, ti, side="right") - 1,
                    0, self.cabin_axis.size - 2)
        j = np.clip(np.searchsorted(self.ambient_axis, to, side="right") - 1,
                    0, self.ambient_axis.size - 2)
        u = (ti - self.cabin_axis[i]) / (self.cabin_axis[i + 1] - self.cabin_axis[i])
        v = (to - self.ambient_axis[j]) / (self.ambient_axis[j + 1] - self.ambient_axis[j])
        g = self.base_grid
        out = ((1 - u) * (1 - v) * g[i, j] + u * (1 - v) * g[i + 1, j]
               + (1 - u) * v * g[i, j + 1] + u * v * g[i + 1, j + 1])
        return out if out.ndim else float(out)

    def plr_multiplier(self, plr):
        p = self._clamped(plr, self.plr_axis, "plr")
        out = np.interp(p, self.plr_axis, self.plr_factor)
        return out if out.ndim else float(out)

    def cop(self, t_in, t_out, plr):
        """COP = base(t_in, t_out) * plr_factor(plr); strictly positive."""
        return self.base(t_in, t_out) * self.plr_multiplier(plr)

    def to_dict(self) -> dict:
        return {
            "cabin_temp_axis_c": self.cabin_axis.tolist(),
            "ambient_temp_axis_c": self.ambient_axis.tolist(),
            "base_grid": self.base_grid.tolist(),
            "plr_axis": self.plr_axis.tolist(),
            "plr_factor": self.plr_factor.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CopMap":
        return cls(d["cabin_temp_axis_c"], d["ambient_temp_axis_c"], d["base_grid"],
                   d["plr_axis"], d["plr_factor"])


def partial_load_ratio(q_cool_w, limits: PlantLimits):
    """Actual cooling capacity over nominal capacity, in [0, 1]."""
    q = np.asarray(q_cool_w, dtype=float)
    if np.any(q < 0) or np.any(q > limits.nominal_capacity_w):
        raise ValueError(f"cooling capacity outside [0, {limits.nominal_capacity_w}] W")
    out = q / limits.nominal_capacity_w
    return float(out) if out.ndim == 0 else out


def cop(cop_map: CopMap, t_in, t_out, plr):
    return cop_map.cop(t_in, t_out, plr)


def electric_power(q_cool_w, cop_value):
    """Electric power P = Q_cool / COP."""
    if np.any(np.asarray(cop_value) <= 0):
        raise ValueError("COP must be > 0")
    if np.any(np.asarray(q_cool_w) < 0):
        raise ValueError("cooling capacity must be >= 0")
    out = np.asarray(q_cool_w, dtype=float) / cop_value
    return float(out) if out.ndim == 0 else out


def compressor_speed(q_cool_w, limits: PlantLimits):
    """Linear capacity-to-speed map over the compressor speed range, r/min."""
    plr = partial_load_ratio(q_cool_w, limits)
    lo, hi = limits.compressor_speed_min_rpm, limits.compressor_speed_max_rpm
    out = np.clip(lo + plr * (hi - lo), lo, hi)
    return float(out) if np.ndim(out) == 0 else out


def clamp_command(q_prev_w: float, q_requested_w: float, dt_s: float,
                  limits: PlantLimits) -> float:
    """Clip a requested capacity to the slew band around q_prev and the bounds."""
    swing = limits.rate_limit_w_per_s * dt_s
    lo = max(q_prev_w - swing, limits.q_cool_min_w)
    hi = min(q_prev_w + swing, limits.q_cool_max_w)
    return float(min(max(q_requested_w, lo), hi))
