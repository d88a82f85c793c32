"""Supervisory switched-control simulation toolkit."""

from .bounds import (GainFn, InfeasibleError, KLExp, chi,
                     convergence_time_bound, corollary_dwell_functions,
                     dwell_from_beta, lure_siios_estimate, optimal_threshold,
                     solve_lyapunov_small, theorem1_margins, theorem1_monitor,
                     theorem2_margins, theorem2_monitor, time_to_level)
from .integrate import (IntegrationError, IntegratorConfig, NoCrossingError,
                        locate_crossing, rk4_step)
from .simulate import Trajectory, simulate
from .supervisors import (DWELL, HYSTERESIS, SupervisorState, dwell_step,
                          hysteresis_step, init_supervisor, supervisor_step)
from .system import (GeneralizedNormParams, Mode, ModeFamily, Partition,
                     SUP_NORM, SupervisorConfig, SwitchEvent, SwitchLog,
                     average_dwell, constant_dwell, count_switches,
                     default_chi, in_switch_band, interval_index, s_norm,
                     validate_config)

__all__ = [name for name in dir() if not name.startswith("_")]

__version__ = "0.1.0"
