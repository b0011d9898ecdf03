"""Combined cabin + AC plant model shared by the simulator and the optimizers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .plant import CopMap, PlantLimits, electric_power, partial_load_ratio
from .thermal import (EnvironmentSample, ThermalLoads, VehicleThermalConfig,
                      affine_load_coefficients, compute_loads)


def rk4_step(f, y, dt):
    """One fixed-step classical Runge-Kutta update of y' = f(y)."""
    k1 = f(y)
    k2 = f(y + 0.5 * dt * k1)
    k3 = f(y + 0.5 * dt * k2)
    k4 = f(y + dt * k3)
    return y + dt * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0


@dataclass(frozen=True)
class CabinModel:
    """Thermal envelope, COP map and plant limits bundled for closed-loop use."""

    thermal: VehicleThermalConfig
    cop_map: CopMap
    limits: PlantLimits

    def loads(self, env: EnvironmentSample, t_in) -> ThermalLoads:
        return compute_loads(self.thermal, env, t_in)

    def load_coefficients(self, env: EnvironmentSample) -> tuple[float, float]:
        """(a, b) with total load = a - b*t_in under the given conditions."""
        return affine_load_coefficients(self.thermal, env)

    def derivative(self, env: EnvironmentSample, t_in, q_cool_w):
        """dT_in/dt with the capacity held at q_cool_w."""
        a, b = self.load_coefficients(env)
        return (a - b * t_in - q_cool_w) / self.thermal.cabin.heat_capacity_j_k

    def step_temperature(self, env: EnvironmentSample, t_in, q_cool_w, dt_s):
        """Integrate the cabin ODE over one step (RK4, capacity held constant).

        Accepts scalars or broadcastable arrays for ``t_in`` and ``q_cool_w``.
        """
        a, b = self.load_coefficients(env)
        cap = self.thermal.cabin.heat_capacity_j_k

        def f(t):
            return (a - b * t - q_cool_w) / cap

        return rk4_step(f, t_in, dt_s)

    def power(self, env: EnvironmentSample, t_in, q_cool_w):
        """(electric power W, COP) for a capacity at the given cabin state."""
        plr = partial_load_ratio(q_cool_w, self.limits)
        cop_value = self.cop_map.cop(t_in, env.ambient_c, plr)
        return electric_power(q_cool_w, cop_value), cop_value

    def equilibrium_load(self, env: EnvironmentSample, t_in: float) -> float:
        """Capacity that holds t_in exactly (may exceed the plant limits)."""
        return self.loads(env, t_in).total_w

    def exact_temperature(self, env: EnvironmentSample, t0: float, q_cool_w: float,
                          t_elapsed_s) -> float:
        """Closed-form solution of the affine cabin ODE under constant conditions.

        T(t) = T_ss + (T0 - T_ss) * exp(-b*t/C) with T_ss = (a - Q)/b.
        Serves as the independent oracle for the RK4 path; b = 0 degenerates
        to linear drift.
        """
        a, b = self.load_coefficients(env)
        cap = self.thermal.cabin.heat_capacity_j_k
        t = np.asarray(t_elapsed_s, dtype=float)
        if abs(b) < 1e-12:
            out = t0 + (a - q_cool_w) / cap * t
        else:
            t_ss = (a - q_cool_w) / b
            out = t_ss + (t0 - t_ss) * np.exp(-b * t / cap)
        return float(out) if out.ndim == 0 else out
