"""EV cabin air-conditioning simulation and controller benchmarking toolkit."""

from .config import AppConfig, default_config, load_config
from .controllers import (BangBangConfig, BangBangController, ControllerInput,
                          DpBenchmarkController, MarkovPredictor, PerfectPredictor,
                          SmpcController, bang_bang_step, dp_benchmark)
from .cycles import CycleFile, builtin_cycle, list_builtin_cycles, synthetic_cycle
from .dp import DisturbanceSequence, Grid, Policy, StageCost, solve, stage_cost, transition
from .experiments import (ComparisonResult, SweepSpec, report_csv, report_table,
                          run_comparison, run_sweep)
from .markov import (TransitionMatrix, VelocityQuantizer, fit, predict,
                     vel_accel_density)
from .model import CabinModel, rk4_step
from .plant import (CopMap, PlantLimits, clamp_command, compressor_speed, cop,
                    electric_power, partial_load_ratio)
from .simulate import (Mission, RunMetrics, SimulationTrace, limit_violations,
                       metrics, run, scale_cycle)
from .thermal import (BodyPanel, CabinAirConfig, EnvironmentSample, Layer,
                      ThermalLoads, VehicleThermalConfig, WindowPanel,
                      cabin_temp_derivative, compute_loads, conduction_load,
                      external_convective_coeff, heat_transfer_coeff,
                      internal_convective_coeff, occupant_load, radiation_load,
                      ventilation_load)

__version__ = "0.1.0"
