"""Configuration: one JSON document describing vehicle, plant, cost and solver.

The bundled default (``data/default_config.json``) is a representative,
lightly insulated sedan on fresh-air ventilation with a mid-size electric AC
plant; its values are placeholders chosen to behave plausibly, not measured
ground truth.  Field-by-field units are documented in the README.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .controllers import BangBangConfig
from .dp import Grid, StageCost
from .model import CabinModel
from .plant import CopMap, PlantLimits
from .thermal import BodyPanel, CabinAirConfig, Layer, VehicleThermalConfig, WindowPanel


@dataclass(frozen=True)
class SimDefaults:
    initial_temp_c: float = 40.0
    initial_q_w: float = 0.0
    include_pulldown_in_stats: bool = True
    dt_s: float = 1.0


@dataclass(frozen=True)
class AppConfig:
    """Everything a run needs, parsed and validated."""

    thermal: VehicleThermalConfig
    cop_map: CopMap
    limits: PlantLimits
    cost: StageCost
    grid: Grid
    bangbang: BangBangConfig
    smpc_horizon: int
    smpc_mode: str
    smpc_terminal_tail_s: float
    sim: SimDefaults

    def model(self) -> CabinModel:
        return CabinModel(thermal=self.thermal, cop_map=self.cop_map, limits=self.limits)


def _parse_thermal(d: dict) -> VehicleThermalConfig:
    panels = tuple(
        BodyPanel(
            name=p.get("name", f"panel{i}"),
            area_m2=p["area_m2"],
            absorptivity=p["absorptivity"],
            layers=tuple(Layer(la["thickness_m"], la["conductivity_w_mk"])
                         for la in p.get("layers", [])),
        )
        for i, p in enumerate(d["panels"])
    )
    windows = tuple(
        WindowPanel(
            name=w.get("name", f"window{i}"),
            area_m2=w["area_m2"],
            tilt_rad=w["tilt_rad"],
            solar_input_coeff=w["solar_input_coeff"],
            absorptivity=w["absorptivity"],
            shading_factor=w["shading_factor"],
        )
        for i, w in enumerate(d["windows"])
    )
    cabin = CabinAirConfig(**d["cabin"])
    return VehicleThermalConfig(
        panels=panels, windows=windows, cabin=cabin,
        surface_air_delta_c=d.get("surface_air_delta_c", 3.0),
        internal_film_curve_c=d.get("internal_film_curve_c", 3.0),
    )


def parse_config(doc: dict) -> AppConfig:
    try:
        thermal = _parse_thermal(doc["thermal"])
        cop_map = CopMap.from_dict(doc["cop"])
        limits = PlantLimits(**doc["plant"])
        cost = StageCost(
            energy_weight=doc["cost"]["energy_weight"],
            comfort_weight=doc["cost"]["comfort_weight"],
            target_temp_c=doc["cost"]["target_temp_c"],
        )
        g = doc["dp_grid"]
        grid = Grid.regular(g["temp_min_c"], g["temp_max_c"], g["temp_step_c"],
                            g["q_min_w"], g["q_max_w"], g["q_step_w"],
                            g.get("dt_s", 1.0))
        bangbang = BangBangConfig(**doc["bangbang"])
        smpc = doc.get("smpc", {})
        sim = SimDefaults(**doc.get("sim", {}))
    except KeyError as exc:
        raise ValueError(f"configuration is missing required key {exc}") from None
    return AppConfig(
        thermal=thermal, cop_map=cop_map, limits=limits, cost=cost, grid=grid,
        bangbang=bangbang,
        smpc_horizon=int(smpc.get("horizon_steps", 5)),
        smpc_mode=smpc.get("prediction_mode", "argmax"),
        smpc_terminal_tail_s=float(smpc.get("terminal_comfort_tail_s", 30.0)),
        sim=sim,
    )


def load_config(path=None) -> AppConfig:
    """Parse a config JSON; with no path, the bundled default."""
    if path is None:
        ref = resources.files("evcool").joinpath("data/default_config.json")
        doc = json.loads(ref.read_text())
    else:
        doc = json.loads(Path(path).read_text())
    return parse_config(doc)


def default_config() -> AppConfig:
    return load_config(None)
