import numpy as np
import pytest

from evcool.config import default_config
from evcool.model import CabinModel
from evcool.plant import CopMap, PlantLimits
from evcool.thermal import (BodyPanel, CabinAirConfig, EnvironmentSample, Layer,
                            VehicleThermalConfig, WindowPanel)


@pytest.fixture(scope="session")
def cfg():
    return default_config()


@pytest.fixture(scope="session")
def model(cfg):
    return cfg.model()


@pytest.fixture()
def env_hot():
    return EnvironmentSample(time_s=0.0, ambient_c=33.0, solar_wm2=830.0,
                             air_speed_ms=40.0 / 3.6)


def make_flat_cop_map(value: float = 2.0) -> CopMap:
    return CopMap(cabin_axis=[0.0, 50.0], ambient_axis=[0.0, 60.0],
                  base_grid=[[value, value], [value, value]],
                  plr_axis=[0.0, 1.0], plr_factor=[1.0, 1.0])


def make_toy_model(load_w: float = 145.0, cop_value: float = 2.0,
                   rate_limit: float = 1e9, q_max: float = 20000.0,
                   volume_m3: float = 3.0) -> CabinModel:
    """Constant-load cabin (no envelope, full recirculation) with a flat COP map.

    Total load is temperature-independent: occupants only, 145 W for the
    default.  ``load_w`` > 145 is realized through the occupant correction.
    """
    passengers = 0
    correction = 1.0
    if load_w != 145.0:
        passengers = 1
        correction = (load_w - 145.0) / 116.0
    cabin = CabinAirConfig(air_volume_m3=volume_m3, recirculation_coeff=1.0,
                           passengers=passengers, occupant_correction=correction)
    thermal = VehicleThermalConfig(panels=(), windows=(), cabin=cabin)
    limits = PlantLimits(q_cool_min_w=0.0, q_cool_max_w=q_max,
                         rate_limit_w_per_s=rate_limit, nominal_capacity_w=q_max)
    return CabinModel(thermal=thermal, cop_map=make_flat_cop_map(cop_value), limits=limits)


def simple_panel(resistance: float = 0.1, area: float = 1.0,
                 absorptivity: float = 0.5) -> BodyPanel:
    return BodyPanel(name="test", area_m2=area, absorptivity=absorptivity,
                     layers=(Layer(thickness_m=resistance * 0.05,
                                   conductivity_w_mk=0.05),))


def simple_window(area: float = 1.0, tilt: float = np.pi / 2, eta: float = 0.8,
                  rho_g: float = 0.05, shading: float = 1.0) -> WindowPanel:
    return WindowPanel(name="test", area_m2=area, tilt_rad=tilt,
                       solar_input_coeff=eta, absorptivity=rho_g,
                       shading_factor=shading)
