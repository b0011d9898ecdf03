"""Cabin thermal load model.

The cabin is a single lumped air node.  Four load terms feed it:

  conduction   Q_c = sum K·F·[(T_out + rho·I/alpha_w) - T_in]   (sol-air driven)
  radiation    Q_r = sum q·F_g·sin(phi),  q = (eta·I + rho_g·I·alpha_n/alpha_w)·C
  occupants    Q_m = 116·n_p·beta + 145
  ventilation  Q_n = m_e·(1 - xi)·Cp_air·(T_out - T_in)

and the air temperature evolves as

  dT_in/dt = (Q_c + Q_r + Q_m + Q_n - Q_cool) / (rho_air·V_air·Cp_air)

Film coefficients come from empirical correlations: the external one grows
with the relative air speed (vehicle speed, still ambient air assumed), the
internal one depends on the surface-to-air temperature difference.  The
internal temperature difference is not resolved by a single-node model, so it
is a fixed configuration parameter; with it fixed, every load term is affine
in T_in and the cabin ODE stays linear, which the integration tests exploit.

Temperatures are degC, areas m^2, fluxes W/m^2, speeds m/s, loads W.
All functions are pure and accept numpy arrays for ``t_in``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# Eq-5 style internal film correlation constants.
INTERNAL_FILM_LINEAR_A = 3.49
INTERNAL_FILM_LINEAR_B = 0.093
INTERNAL_FILM_CURVE_C_RANGE = (2.67, 3.26)
INTERNAL_AIR_SPEED_RANGE = (0.25, 3.0)  # m/s, validity range of the correlation

DRIVER_HEAT_W = 145.0
PASSENGER_HEAT_W = 116.0


@dataclass(frozen=True)
class Layer:
    """One material layer of a body panel."""

    thickness_m: float
    conductivity_w_mk: float

    def __post_init__(self):
        if self.thickness_m <= 0:
            raise ValueError(f"layer thickness must be > 0, got {self.thickness_m}")
        if self.conductivity_w_mk <= 0:
            raise ValueError(f"layer conductivity must be > 0, got {self.conductivity_w_mk}")

    @property
    def resistance(self) -> float:
        return self.thickness_m / self.conductivity_w_mk


@dataclass(frozen=True)
class BodyPanel:
    """Opaque (or glazed) envelope element that conducts heat into the cabin."""

    name: str
    area_m2: float
    absorptivity: float
    layers: tuple[Layer, ...] = ()

    def __post_init__(self):
        if self.area_m2 <= 0:
            raise ValueError(f"panel {self.name!r}: area must be > 0")
        if not 0.0 <= self.absorptivity <= 1.0:
            raise ValueError(f"panel {self.name!r}: absorptivity must be in [0, 1]")
        object.__setattr__(self, "layers", tuple(self.layers))

    @property
    def material_resistance(self) -> float:
        return sum(layer.resistance for layer in self.layers)


@dataclass(frozen=True)
class WindowPanel:
    """Glazed element admitting solar gain (its conduction is carried by a BodyPanel)."""

    name: str
    area_m2: float
    tilt_rad: float  # angle from vertical; horizontal glass = pi/2
    solar_input_coeff: float
    absorptivity: float
    shading_factor: float

    def __post_init__(self):
        if self.area_m2 <= 0:
            raise ValueError(f"window {self.name!r}: area must be > 0")
        if not 0.0 <= self.tilt_rad <= math.pi / 2:
            raise ValueError(f"window {self.name!r}: tilt must be in [0, pi/2]")
        if not 0.0 <= self.solar_input_coeff <= 1.0:
            raise ValueError(f"window {self.name!r}: solar input coeff must be in [0, 1]")
        if not 0.0 <= self.absorptivity <= 1.0:
            raise ValueError(f"window {self.name!r}: absorptivity must be in [0, 1]")
        if self.solar_input_coeff + self.absorptivity > 1.0:
            raise ValueError(f"window {self.name!r}: input coeff + absorptivity must be <= 1")
        if not 0.0 < self.shading_factor <= 1.0:
            raise ValueError(f"window {self.name!r}: shading factor must be in (0, 1]")


@dataclass(frozen=True)
class CabinAirConfig:
    """Cabin air node and ventilation parameters."""

    air_density_kg_m3: float = 1.2
    air_volume_m3: float = 3.0
    air_heat_capacity_j_kgk: float = 1005.0
    internal_air_speed_ms: float = 0.5
    recirculation_coeff: float = 0.5
    evaporator_mass_flow_kg_s: float = 0.186
    passengers: int = 4
    occupant_correction: float = 1.0

    def __post_init__(self):
        for name in ("air_density_kg_m3", "air_volume_m3", "air_heat_capacity_j_kgk",
                     "internal_air_speed_ms", "evaporator_mass_flow_kg_s", "occupant_correction"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        if not 0.0 <= self.recirculation_coeff <= 1.0:
            raise ValueError("recirculation_coeff must be in [0, 1]")
        if self.passengers < 0:
            raise ValueError("passengers must be >= 0")

    @property
    def heat_capacity_j_k(self) -> float:
        """Lumped thermal capacity rho_air * V_air * Cp_air of the cabin node."""
        return self.air_density_kg_m3 * self.air_volume_m3 * self.air_heat_capacity_j_kgk


@dataclass(frozen=True)
class EnvironmentSample:
    """Ambient conditions at one instant."""

    time_s: float
    ambient_c: float
    solar_wm2: float
    air_speed_ms: float  # relative air flow = vehicle speed (still outside air)

    def __post_init__(self):
        if self.solar_wm2 < 0:
            raise ValueError("solar flux must be >= 0")
        if self.air_speed_ms < 0:
            raise ValueError("relative air speed must be >= 0")
        if not -50.0 <= self.ambient_c <= 60.0:
            raise ValueError(f"ambient temperature {self.ambient_c} outside [-50, 60] degC")


@dataclass(frozen=True)
class ThermalLoads:
    """Load breakdown in watts. Conduction/ventilation may be negative (heat leaving)."""

    conduction_w: float
    radiation_w: float
    occupants_w: float
    ventilation_w: float

    @property
    def total_w(self) -> float:
        return self.conduction_w + self.radiation_w + self.occupants_w + self.ventilation_w


@dataclass(frozen=True)
class VehicleThermalConfig:
    """Full vehicle envelope: conduction panels, solar windows, cabin air node.

    ``surface_air_delta_c`` is the assumed interior-surface-to-air temperature
    difference used by the internal film correlation (not resolved by the
    single-node model).  ``internal_film_curve_c`` is the power-law coefficient
    of that correlation, empirically 2.67..3.26.
    """

    panels: tuple[BodyPanel, ...]
    windows: tuple[WindowPanel, ...]
    cabin: CabinAirConfig = field(default_factory=CabinAirConfig)
    surface_air_delta_c: float = 3.0
    internal_film_curve_c: float = 3.0

    def __post_init__(self):
        object.__setattr__(self, "panels", tuple(self.panels))
        object.__setattr__(self, "windows", tuple(self.windows))
        lo, hi = INTERNAL_FILM_CURVE_C_RANGE
        if not lo <= self.internal_film_curve_c <= hi:
            raise ValueError(f"internal_film_curve_c must be in [{lo}, {hi}]")
        if self.surface_air_delta_c < 0:
            raise ValueError("surface_air_delta_c must be >= 0")


def external_convective_coeff(air_speed_ms):
    """External film coefficient 1.163*(4 + 12*sqrt(v)), W/(m^2 K).

    ``air_speed_ms`` is the air speed relative to the body in m/s; with still
    outside air this equals the vehicle speed.  Strictly increasing in v,
    4.652 at v = 0.
    """
    v = np.asarray(air_speed_ms, dtype=float)
    if np.any(v < 0):
        raise ValueError("relative air speed must be >= 0")
    out = 1.163 * (4.0 + 12.0 * np.sqrt(v))
    return float(out) if np.isscalar(air_speed_ms) or out.ndim == 0 else out


def internal_convective_coeff(delta_t_c, air_speed_ms, curve_coeff=3.0):
    """Internal film coefficient from the surface-air temperature difference.

    Below 5 degC difference: a + b*dT with a=3.49, b=0.093.  At and above
    5 degC: c*dT^0.25 with c in [2.67, 3.26] (the boundary point uses the
    power-law branch; the correlation is not continuous there).  The cabin
    air speed only gates validity: it must lie in [0.25, 3] m/s.
    """
    lo, hi = INTERNAL_AIR_SPEED_RANGE
    if not lo <= air_speed_ms <= hi:
        raise ValueError(f"cabin air speed {air_speed_ms} outside [{lo}, {hi}] m/s")
    c_lo, c_hi = INTERNAL_FILM_CURVE_C_RANGE
    if not c_lo <= curve_coeff <= c_hi:
        raise ValueError(f"curve coefficient {curve_coeff} outside [{c_lo}, {c_hi}]")
    if delta_t_c < 0:
        raise ValueError("surface-air temperature difference must be >= 0")
    if delta_t_c < 5.0:
        return INTERNAL_FILM_LINEAR_A + INTERNAL_FILM_LINEAR_B * delta_t_c
    return curve_coeff * delta_t_c ** 0.25


def heat_transfer_coeff(panel: BodyPanel, alpha_w: float, alpha_n: float) -> float:
    """Series heat transfer coefficient K = (sum d_i/l_i + 1/a_w + 1/a_n)^-1."""
    if alpha_w <= 0 or alpha_n <= 0:
        raise ValueError("film coefficients must be > 0")
    return 1.0 / (panel.material_resistance + 1.0 / alpha_w + 1.0 / alpha_n)


def conduction_load(panels, t_out, t_in, solar_wm2, alpha_w, alpha_n):
    """Conduction load through all panels, sol-air corrected on sunlit surfaces."""
    total = 0.0
    for panel in panels:
        k = heat_transfer_coeff(panel, alpha_w, alpha_n)
        sol_air = t_out + panel.absorptivity * solar_wm2 / alpha_w
        total = total + k * panel.area_m2 * (sol_air - t_in)
    return total


def radiation_load(windows, solar_wm2, alpha_w, alpha_n):
    """Solar gain through the glazing; zero for vertical glass (sin 0 tilt)."""
    if solar_wm2 < 0:
        raise ValueError("solar flux must be >= 0")
    total = 0.0
    for w in windows:
        q = (w.solar_input_coeff * solar_wm2
             + w.absorptivity * solar_wm2 * alpha_n / alpha_w) * w.shading_factor
        total += q * w.area_m2 * math.sin(w.tilt_rad)
    return total


def occupant_load(passengers: int, correction: float = 1.0) -> float:
    """Sensible heat: 145 W for the driver plus 116 W per (corrected) passenger."""
    if passengers < 0:
        raise ValueError("passenger count must be >= 0")
    if correction <= 0:
        raise ValueError("occupant correction must be > 0")
    return PASSENGER_HEAT_W * passengers * correction + DRIVER_HEAT_W


def ventilation_load(cabin: CabinAirConfig, t_out, t_in):
    """Fresh-air ventilation load m_e*(1-xi)*Cp*(T_out - T_in)."""
    return (cabin.evaporator_mass_flow_kg_s * (1.0 - cabin.recirculation_coeff)
            * cabin.air_heat_capacity_j_kgk * (t_out - t_in))


def cabin_temp_derivative(loads: ThermalLoads, q_cool_w, cabin: CabinAirConfig):
    """dT_in/dt in K/s from the load sum, the cooling capacity and the air node."""
    if np.any(np.asarray(q_cool_w) < 0):
        raise ValueError("cooling capacity must be >= 0")
    return (loads.total_w - q_cool_w) / cabin.heat_capacity_j_k


def film_coefficients(cfg: VehicleThermalConfig, air_speed_ms: float) -> tuple[float, float]:
    """(alpha_w, alpha_n) for one step; alpha_w is shared by conduction and radiation."""
    alpha_w = external_convective_coeff(air_speed_ms)
    alpha_n = internal_convective_coeff(
        cfg.surface_air_delta_c, cfg.cabin.internal_air_speed_ms, cfg.internal_film_curve_c)
    return alpha_w, alpha_n


def compute_loads(cfg: VehicleThermalConfig, env: EnvironmentSample, t_in) -> ThermalLoads:
    """All four load terms at cabin temperature ``t_in`` (scalar or array)."""
    alpha_w, alpha_n = film_coefficients(cfg, env.air_speed_ms)
    return ThermalLoads(
        conduction_w=conduction_load(cfg.panels, env.ambient_c, t_in, env.solar_wm2,
                                     alpha_w, alpha_n),
        radiation_w=radiation_load(cfg.windows, env.solar_wm2, alpha_w, alpha_n),
        occupants_w=occupant_load(cfg.cabin.passengers, cfg.cabin.occupant_correction),
        ventilation_w=ventilation_load(cfg.cabin, env.ambient_c, t_in),
    )


def affine_load_coefficients(cfg: VehicleThermalConfig, env: EnvironmentSample) -> tuple[float, float]:
    """Coefficients (a, b) with total load = a - b*T_in for fixed conditions.

    Exact because every term is affine in T_in (the internal film coefficient
    uses a fixed configured surface-air difference).  Used to make the cabin
    ODE cheap inside the DP sweeps and to build the closed-form exponential
    oracle for the integrator.
    """
    l0 = compute_loads(cfg, env, 0.0).total_w
    l1 = compute_loads(cfg, env, 1.0).total_w
    b = l0 - l1
    return l0, b
