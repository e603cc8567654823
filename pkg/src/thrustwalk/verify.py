"""Built-in invariant and property checks behind the `verify` subcommand.

Fast, self-contained fixtures; one pass/fail line per check. The pytest
suite covers the same ground (and more) with finer assertions.
"""

import numpy as np

from . import dynamics
from .dynamics import ModelParams, RobotState, state_advance
from .ground import GroundParams, grf
from .control import GaitConfig, ControllerGains, solve_ik, combine_thrust
from .observer import ObserverConfig, MomentumObserver
from .evaluate import nrmse, EvaluationError
from .rotations import so3_exp


def _random_state(rng, scale=1.0):
    return RobotState(p=rng.normal(size=3),
                      R=so3_exp(rng.normal(size=3) * scale),
                      joint=rng.normal(size=4) * scale,
                      knee=rng.normal(size=2) * scale,
                      v=rng.normal(size=10) * scale,
                      knee_rate=rng.normal(size=2) * scale)


def check_forward_kinematics():
    params = ModelParams()
    fp = dynamics.forward_kinematics(RobotState(), params)
    return np.allclose(fp.foot_l, [0.0, 0.7, -0.4], atol=1e-12)


def check_mass_matrix_spd():
    params = ModelParams()
    rng = np.random.default_rng(0)
    for _ in range(100):
        M = dynamics.mass_matrix(_random_state(rng), params)
        if np.max(np.abs(M - M.T)) > 0.0 or np.linalg.eigvalsh(M)[0] <= 0.0:
            return False
    return True


def check_jacobians_fd():
    params = ModelParams()
    rng = np.random.default_rng(1)
    h = 1e-6
    for _ in range(10):
        s = _random_state(rng)
        JL, JR = dynamics.foot_jacobians(s, params)
        vel = np.concatenate([JL @ s.v, JR @ s.v])
        fp_p = dynamics.forward_kinematics(state_advance(s, h), params)
        fp_m = dynamics.forward_kinematics(state_advance(s, -h), params)
        fd = np.concatenate([(fp_p.foot_l - fp_m.foot_l) / (2 * h),
                             (fp_p.foot_r - fp_m.foot_r) / (2 * h)])
        if np.max(np.abs(vel - fd)) > 1e-5 * max(1.0, np.max(np.abs(fd))):
            return False
    return True


def check_ground_examples():
    gp = GroundParams()
    ok = np.allclose(grf([0, 0, 0.01], [1, 1, -1], gp), 0.0)
    ok &= np.allclose(grf([0, 0, -0.001], [0, 0, 0], gp), [0, 0, 8.0])
    ok &= np.allclose(grf([0, 0, -0.001], [0, 0, 0.5], gp), [0, 0, 8.0])
    fx = grf([0, 0, -0.001], [1.0, 0, 0], gp)[0]
    return ok and abs(fx - (-(0.64) * 8.0 - 0.8)) < 1e-9


def check_ik_roundtrip():
    params = ModelParams()
    rng = np.random.default_rng(2)
    for _ in range(50):
        st = RobotState()
        st.joint[0], st.joint[2] = rng.uniform(-1.2, 1.2, 2)
        fp = dynamics.forward_kinematics(st, params)
        sol = solve_ik(fp.foot_l, params, "L")
        st2 = RobotState()
        st2.joint[0], st2.joint[2] = sol.gamma_h, sol.phi_h
        fp2 = dynamics.forward_kinematics(st2, params)
        if np.max(np.abs(fp2.foot_l - fp.foot_l)) > 1e-9:
            return False
    return True


def check_combine_thrust():
    rng = np.random.default_rng(3)
    for _ in range(20):
        u_tc, u_tl = rng.normal(size=3), rng.normal(size=3)
        u = combine_thrust(u_tc, u_tl, -u_tl)
        if not np.allclose(u[:3] + u[3:], u_tc, atol=1e-12):
            return False
    return True


def _frozen_model():
    rng = np.random.default_rng(4)
    A = rng.normal(size=(10, 10))
    M = A @ A.T + 10.0 * np.eye(10)
    h = rng.normal(size=10)

    class Snap:
        pass

    class Model:
        def __init__(self):
            self.M0, self.h0 = M, h
            B_t = np.zeros((10, 6))
            B_t[:3, :3] = np.eye(3)
            B_t[:3, 3:] = np.eye(3)
            B_t[3, 2] = 0.15
            B_t[3, 5] = -0.15
            self.B_t0 = B_t
            self.B_g0 = np.zeros((10, 6))
            self.B_j0 = np.zeros((10, 4))
            self.B_j0[6:, :] = np.eye(4)

        def snapshot(self, state):
            s = Snap()
            s.M, s.h = self.M0, self.h0
            s.B_t, s.B_g, s.B_j = self.B_t0, self.B_g0, self.B_j0
            s.foot_heights = np.array([1.0, 1.0])
            return s

    return Model()


class _FrozenState:
    def __init__(self, v):
        self.v = np.asarray(v, dtype=float)

    def is_finite(self):
        return bool(np.all(np.isfinite(self.v)))


def check_observer_zero_input():
    model = _frozen_model()
    cfg = ObserverConfig(mode="supplied",
                         k0_force=[5.0] * 3, k0_torque=[5.0] * 3,
                         k0_hips=[5.0] * 4)
    obs = MomentumObserver(cfg, model)
    dt = 1e-3
    v = np.zeros(10)
    Minv = np.linalg.inv(model.M0)
    worst = 0.0
    for k in range(500):
        out = obs.step(_FrozenState(v), np.zeros(4), dt,
                       lam_supplied=np.zeros(6))
        worst = max(worst, float(np.max(np.abs(out.r))))
        v = v + dt * (Minv @ (-model.h0))
    return worst <= 1e-9


def check_observer_step_response():
    model = _frozen_model()
    k = 25.0
    cfg = ObserverConfig(mode="supplied", k0_force=[k] * 3,
                         k0_torque=[k] * 3, k0_hips=[k] * 4)
    obs = MomentumObserver(cfg, model)
    dt = 1e-4
    u_t = np.array([4.0, 0.0, 2.0, 4.0, 0.0, 2.0])
    w = model.B_t0 @ u_t
    Minv = np.linalg.inv(model.M0)
    v = np.zeros(10)
    t_target = 3.0 / k
    n = int(round(t_target / dt))
    out = None
    for i in range(n + 1):
        out = obs.step(_FrozenState(v), np.zeros(4), dt,
                       lam_supplied=np.zeros(6))
        v = v + dt * (Minv @ (w - model.h0))
    lvl = 1.0 - np.exp(-3.0)
    idx = np.abs(w) > 1e-9
    ratio = out.r[idx] / w[idx]
    return bool(np.all(np.abs(ratio - lvl) < 0.02))


def check_nrmse_examples():
    try:
        nrmse([1.0, 1.0, 1.0], [1.0, 1.0, 1.0])
        return False
    except EvaluationError:
        pass
    v = nrmse([0.0, 1.0], [0.5, 1.5])
    return abs(v - 0.5) < 1e-12


def check_determinism():
    from .config import default_scenario
    from .sim import run
    import io
    sc = default_scenario(sim={"duration": 0.2})
    log1, log2 = run(sc), run(sc)
    b1, b2 = io.StringIO(), io.StringIO()
    for log, buf in ((log1, b1), (log2, b2)):
        for c in log.columns:
            buf.write(",".join(repr(float(x)) for x in log.col(c)))
    return b1.getvalue() == b2.getvalue()


CHECKS = [
    ("forward kinematics zero pose", check_forward_kinematics),
    ("mass matrix symmetric positive definite", check_mass_matrix_spd),
    ("foot Jacobians vs finite differences", check_jacobians_fd),
    ("ground force worked examples", check_ground_examples),
    ("inverse kinematics round trip", check_ik_roundtrip),
    ("thrust combination identity", check_combine_thrust),
    ("observer zero-input fixed point", check_observer_zero_input),
    ("observer first-order step response", check_observer_step_response),
    ("nrmse worked examples", check_nrmse_examples),
    ("simulation determinism (0.2 s)", check_determinism),
]


def run_checks(names=None, out=print):
    """Run the built-in checks; returns True when everything passes."""
    ok_all = True
    for name, fn in CHECKS:
        if names and not any(s in name for s in names):
            continue
        try:
            ok = bool(fn())
        except Exception as e:  # a crashed check is a failed check
            ok = False
            out(f"FAIL  {name}  ({type(e).__name__}: {e})")
            ok_all = False
            continue
        out(f"{'PASS' if ok else 'FAIL'}  {name}")
        ok_all &= ok
    return ok_all
