"""Thruster-assisted bipedal walking simulator with a conjugate-momentum
thruster-force observer."""

from .dynamics import (ModelParams, RobotState, FramePositions, DynSnapshot,
                       forward_kinematics, mass_matrix, bias_forces,
                       coriolis_matrix, gravity_forces, input_mappings,
                       forward_dynamics, foot_jacobians,
                       stacked_foot_jacobian, stacked_foot_jacobian_dot,
                       total_energy)
from .ground import GroundParams, grf, both_feet_grf
from .control import (GaitConfig, ControllerGains, WalkController,
                      inverse_kinematics, solve_ik, UnreachableTargetError,
                      joint_pid, vlip_thruster, stabilizing_thrust,
                      combine_thrust, center_of_pressure, standing_pose,
                      nominal_body_height, GaitGenerator)
from .observer import (ObserverConfig, MomentumObserver, RobotModel,
                       constraint_grf, body_frame_thrust, j_c_dot,
                       preset_config, GAIN_PRESETS)
from .sim import Scenario, SimConfig, SimLog, rk4_step, run, detect_phase
from .config import (default_scenario, load_scenario, default_config,
                     save_config, ConfigError, apply_observer_mode)
from .evaluate import nrmse, evaluate_log, NrmseReport, EvaluationError

__version__ = "0.1.0"
