"""Compliant ground contact: spring-damper normal force with undamped rebound,
per-axis Stribeck tangential friction, Heaviside contact gating.

Flat ground at z = 0. Forces are world-frame, acting on the point feet.
"""

from dataclasses import dataclass
import numpy as np

from .dynamics import forward_kinematics


@dataclass
class GroundParams:
    k_gp: float = 8000.0
    k_gd: float = 268.0
    mu_s: float = 0.8
    mu_c: float = 0.64
    mu_v: float = 0.8
    v_s: float = 0.01

    def __post_init__(self):
        self.validate()

    def validate(self):
        if not self.k_gp > 0.0:
            raise ValueError("GroundParams.k_gp must be > 0")
        if self.k_gd < 0.0:
            raise ValueError("GroundParams.k_gd must be >= 0")
        if not (0.0 < self.mu_c <= self.mu_s):
            raise ValueError("GroundParams requires 0 < mu_c <= mu_s")
        if self.mu_v < 0.0:
            raise ValueError("GroundParams.mu_v must be >= 0")
        if not self.v_s > 0.0:
            raise ValueError("GroundParams.v_s must be > 0")


def grf(foot_pos, foot_vel, params):
    """Ground reaction force (3,) on one point foot.

    Zero above the ground. In contact, the normal force is a spring-damper
    with the damping removed while separating (undamped rebound) and clamped
    at >= 0 so the ground never pulls. Tangential friction applies the
    Stribeck curve per axis with sgn(0) = 0, plus a viscous term.
    """
    p = np.asarray(foot_pos, dtype=float)
    v = np.asarray(foot_vel, dtype=float)
    if p[2] > 0.0:
        return np.zeros(3)
    damping = params.k_gd * v[2] if v[2] <= 0.0 else 0.0
    fz = max(-params.k_gp * p[2] - damping, 0.0)
    out = np.empty(3)
    for ax in (0, 1):
        s = v[ax]
        mu = params.mu_c + (params.mu_s - params.mu_c) * np.exp(
            -(s * s) / (params.v_s * params.v_s))
        out[ax] = -mu * fz * np.sign(s) - params.mu_v * s
    out[2] = fz
    return out


def contact_flags(state, params_model):
    """(left, right) booleans: foot at or below the ground plane."""
    fp = forward_kinematics(state, params_model)
    return fp.foot_l[2] <= 0.0, fp.foot_r[2] <= 0.0


def both_feet_grf(state, ground_params, model_params, frames=None, snap=None):
    """Stacked (6,) ground force [left; right] for the current state.

    frames or snap: optional precomputed kinematics to avoid redundant work.
    """
    if snap is not None:
        (pL, vL), (pR, vR) = snap.foot_kinematics()
    else:
        fp = frames if frames is not None else forward_kinematics(state, model_params)
        pL, vL, pR, vR = fp.foot_l, fp.foot_l_vel, fp.foot_r, fp.foot_r_vel
    uL = grf(pL, vL, ground_params)
    uR = grf(pR, vR, ground_params)
    return np.concatenate([uL, uR])
