"""Scenario configuration: YAML load/save with physical parameters under
their conventional symbol names, deep-merged over the shipped defaults.
"""

import numpy as np
import yaml

from .dynamics import ModelParams
from .ground import GroundParams
from .control import GaitConfig, ControllerGains
from .observer import ObserverConfig, GAIN_PRESETS
from .sim import Scenario, SimConfig


class ConfigError(ValueError):
    pass


def default_config():
    """Scenario configuration as a plain nested dict (the shipped defaults)."""
    model = ModelParams()
    ground = GroundParams()
    gait = GaitConfig()
    gains = ControllerGains()
    obs = ObserverConfig()
    sim = SimConfig()
    return {
        "scenario_id": "default",
        "model": {
            "l1": model.l1.tolist(), "l2": model.l2.tolist(),
            "l3": model.l3.tolist(), "l4": model.l4.tolist(),
            "m_B": model.m_B, "m_H": model.m_H, "m_K": model.m_K,
            "I_B": model.I_B, "I_H": model.I_H, "I_K": model.I_K,
            "p_T_L": model.p_T_L.tolist(), "p_T_R": model.p_T_R.tolist(),
            "g": model.g.tolist(),
        },
        "ground": {
            "k_gp": ground.k_gp, "k_gd": ground.k_gd,
            "mu_s": ground.mu_s, "mu_c": ground.mu_c, "mu_v": ground.mu_v,
            "v_s": ground.v_s,
        },
        "gait": {
            "step_length": gait.step_length, "step_height": gait.step_height,
            "step_period": gait.step_period,
            "body_height_ref": gait.body_height_ref,
            "duty_factor": gait.duty_factor,
            "stance_width": gait.stance_width,
            "ramp_cycles": gait.ramp_cycles,
            "press_depth": gait.press_depth,
            "dither_radius": gait.dither_radius,
            "dither_freq": gait.dither_freq,
        },
        "gains": {k: (v.tolist() if isinstance(v, np.ndarray) else v)
                  for k, v in vars(gains).items()},
        "observer": {
            "enabled": obs.enabled, "mode": obs.mode,
            "k0_force": obs.k0_force.tolist(),
            "k0_torque": obs.k0_torque.tolist(),
            "k0_hips": obs.k0_hips.tolist(),
            "sv_cutoff": obs.sv_cutoff,
            "contact_depth": obs.contact_depth,
        },
        "sim": {
            "dt": sim.dt, "duration": sim.duration, "seed": sim.seed,
            "fall_height": sim.fall_height, "fall_tilt": sim.fall_tilt,
        },
    }


def _merge(base, override, path=""):
    out = dict(base)
    for key, val in override.items():
        if key not in base:
            raise ConfigError(f"unknown configuration key {path}{key}")
        if isinstance(base[key], dict):
            if not isinstance(val, dict):
                raise ConfigError(f"{path}{key} must be a mapping")
            out[key] = _merge(base[key], val, f"{path}{key}.")
        else:
            out[key] = val
    return out


def scenario_from_dict(cfg):
    """Build a Scenario from a full nested config dict."""
    try:
        return Scenario(
            scenario_id=str(cfg.get("scenario_id", "default")),
            model=ModelParams(**cfg["model"]),
            ground=GroundParams(**cfg["ground"]),
            gait=GaitConfig(**cfg["gait"]),
            gains=ControllerGains(**cfg["gains"]),
            observer=ObserverConfig(**cfg["observer"]),
            sim=SimConfig(**cfg["sim"]),
        )
    except (TypeError, ValueError) as e:
        raise ConfigError(f"invalid scenario configuration: {e}") from e


def default_scenario(**overrides):
    cfg = default_config()
    if overrides:
        cfg = _merge(cfg, overrides)
    return scenario_from_dict(cfg)


def load_scenario(path, overrides=None):
    """Load a scenario YAML file (partial; merged over the defaults).

    Parse errors carry the line number when the YAML parser provides one.
    """
    try:
        with open(path) as fh:
            user = yaml.safe_load(fh)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        where = f"{path}:{mark.line + 1}" if mark is not None else str(path)
        raise ConfigError(f"{where}: YAML parse error: {e}") from e
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    if user is None:
        user = {}
    if not isinstance(user, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    cfg = _merge(default_config(), user)
    if overrides:
        cfg = _merge(cfg, overrides)
    scenario = scenario_from_dict(cfg)
    if scenario.scenario_id == "default" and "scenario_id" not in user:
        from pathlib import Path
        scenario.scenario_id = Path(path).stem
    return scenario


def apply_observer_mode(scenario, mode):
    """Switch observer mode, applying the matching gain preset."""
    g = GAIN_PRESETS[mode]
    obs = scenario.observer
    scenario.observer = ObserverConfig(
        enabled=obs.enabled, mode=mode,
        k0_force=np.array(g["force"]), k0_torque=np.array(g["torque"]),
        k0_hips=np.array(g["hips"]), sv_cutoff=obs.sv_cutoff,
        contact_depth=obs.contact_depth)
    return scenario


def save_config(cfg, path):
    with open(path, "w") as fh:
        yaml.safe_dump(cfg, fh, sort_keys=False)
    return path
