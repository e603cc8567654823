"""Conjugate-momentum observer for the generalized thruster force.

The observer integrates the measured generalized momentum balance and feeds
the residual through a diagonal first-order filter: the residual converges to
the generalized thruster force with per-channel bandwidth K0. Ground reaction
forces enter either as measured values (force-sensor mode) or from the
contact-constraint model computed with the previous residual.
"""

from dataclasses import dataclass, field
import numpy as np

from . import dynamics


@dataclass
class ObserverConfig:
    enabled: bool = True
    mode: str = "supplied"  # "supplied" | "constraint"
    # diagonal gains by channel group, assembled in v order
    k0_force: np.ndarray = field(default_factory=lambda: np.array([25.0, 25.0, 25.0]))
    k0_torque: np.ndarray = field(default_factory=lambda: np.array([25.0, 25.0, 25.0]))
    k0_hips: np.ndarray = field(default_factory=lambda: np.array([1.0, 1.0, 1.0, 1.0]))
    sv_cutoff: float = 1e-8
    # stance detection depth for the constraint model; excludes grazing
    # contacts for which the rigid-contact premise is meaningless
    contact_depth: float = 0.0015

    def __post_init__(self):
        self.k0_force = np.asarray(self.k0_force, dtype=float).reshape(3)
        self.k0_torque = np.asarray(self.k0_torque, dtype=float).reshape(3)
        self.k0_hips = np.asarray(self.k0_hips, dtype=float).reshape(4)
        self.validate()

    def validate(self):
        if self.mode not in ("supplied", "constraint"):
            raise ValueError(f"unknown observer mode {self.mode!r}")
        if np.any(self.k0_diag() <= 0.0):
            raise ValueError("observer gains must be > 0")

    def k0_diag(self):
        return np.concatenate([self.k0_force, self.k0_torque, self.k0_hips])


# paper-reported gain presets: four unit hip entries plus six per-channel body
# entries applied to (Fx, Fy, Fz, tau_x, tau_y, tau_z)
GAIN_PRESETS = {
    "supplied": {"force": (25.0, 25.0, 25.0), "torque": (25.0, 25.0, 25.0),
                 "hips": (1.0, 1.0, 1.0, 1.0)},
    "constraint": {"force": (800.0, 1200.0, 60.0),
                   "torque": (3000.0, 800.0, 500.0),
                   "hips": (1.0, 1.0, 1.0, 1.0)},
}


def preset_config(mode, enabled=True, sv_cutoff=0.24, contact_depth=0.0015):
    g = GAIN_PRESETS[mode]
    return ObserverConfig(enabled=enabled, mode=mode,
                          k0_force=np.array(g["force"]),
                          k0_torque=np.array(g["torque"]),
                          k0_hips=np.array(g["hips"]),
                          sv_cutoff=sv_cutoff, contact_depth=contact_depth)


class RobotModel:
    """Model interface the observer consumes, backed by the dynamics module.

    Any object with a compatible snapshot() works; tests substitute frozen
    models with constant matrices.
    """

    def __init__(self, params):
        self.params = params

    def snapshot(self, state):
        return dynamics.DynSnapshot(state, self.params)


def j_c_dot(state, model):
    """6x10 time derivative of the stacked foot contact Jacobian."""
    return model.snapshot(state).Jd_feet


def body_frame_thrust(r, state, model, sv_cutoff=1e-8, snap=None):
    """Least-squares recovery of the two thruster forces from the residual.

    Moore-Penrose pseudo-inverse of the stacked thruster Jacobian with a
    relative singular-value cutoff; components of r outside the Jacobian row
    space (equal and opposite forces along the mount line) are unobservable
    and drop out.
    """
    if snap is None:
        snap = model.snapshot(state)
    return np.linalg.pinv(snap.B_t, rcond=sv_cutoff) @ np.asarray(r, dtype=float)


@dataclass
class ConstraintGrf:
    lam: np.ndarray           # (6,) per-foot ground force estimate [L; R]
    stance: tuple             # sides in contact
    rank: int                 # numerical rank of J M^-1 J^T
    deficient: bool           # rank < 3 * number of stance feet
    no_contact: bool


class _ConstraintTerms:
    """Factored contact-constraint solve shared by the estimator paths.

    With M qddot + h = B_j u_j + r + J^T lam and the stance-foot acceleration
    constrained to zero, lam = d - G r where d collects the state terms and
    G = A_pinv J M^-1 with A = J M^-1 J^T (pseudo-inverse with a relative
    singular-value cutoff).
    """

    def __init__(self, state, u_j, snap, sv_cutoff, contact_depth=0.0):
        heights = snap.foot_heights
        self.stance = tuple(side for side, z in zip(("L", "R"), heights)
                            if z <= -contact_depth)
        self.no_contact = not self.stance
        if self.no_contact:
            self.rows = np.array([], dtype=int)
            self.rank = 0
            self.deficient = False
            self.d = np.zeros(0)
            self.G = np.zeros((0, dynamics.NV))
            return
        M, h, B_j = snap.M, snap.h, snap.B_j
        self.rows = np.concatenate([np.arange(3) if s == "L" else np.arange(3, 6)
                                    for s in self.stance])
        J = snap.J_feet[self.rows]
        Jd = snap.Jd_feet[self.rows]
        Minv_Jt = np.linalg.solve(M, J.T)
        A = J @ Minv_Jt
        U, s, Vt = np.linalg.svd(A)
        keep = s > sv_cutoff * s[0] if s[0] > 0.0 else np.zeros_like(s, bool)
        self.rank = int(np.count_nonzero(keep))
        self.deficient = self.rank < 3 * len(self.stance)
        inv_s = np.where(keep, 1.0 / np.where(s > 0, s, 1.0), 0.0)
        A_pinv = Vt.T @ (inv_s[:, None] * U.T)
        JMinv = Minv_Jt.T
        self.G = A_pinv @ JMinv
        self.d = A_pinv @ (JMinv @ (h - B_j @ np.asarray(u_j, float))
                           - Jd @ state.v)

    def lam(self, r):
        """Stacked (6,) ground force estimate for a given residual r."""
        out = np.zeros(6)
        if not self.no_contact:
            out[self.rows] = self.d - self.G @ np.asarray(r, float)
        return out


def constraint_grf(state, r, u_j, model, sv_cutoff=1e-8, snap=None,
                   contact_depth=0.0):
    """Ground force from the zero-acceleration contact constraint.

    Solves the stance-foot constraint with the Moore-Penrose pseudo-inverse
    and reports the numerical rank of the constraint operator.
    """
    if snap is None:
        snap = model.snapshot(state)
    terms = _ConstraintTerms(state, u_j, snap, sv_cutoff, contact_depth)
    return ConstraintGrf(lam=terms.lam(r), stance=terms.stance,
                         rank=terms.rank, deficient=terms.deficient,
                         no_contact=terms.no_contact)


@dataclass
class ObserverOutput:
    r: np.ndarray             # (10,) generalized thruster force estimate
    u_t_hat: np.ndarray       # (6,) body-frame thruster force estimate
    lam_hat: np.ndarray       # (6,) ground force used this step
    rank: int
    deficient: bool
    n_stance: int


class MomentumObserver:
    """First-order momentum-residual estimator of the thruster force.

    Owns the running residual, the trapezoidal accumulator of the momentum
    balance and the previous-step mass matrix for the finite-difference Mdot.
    Purely an observer: never writes back into the plant.
    """

    def __init__(self, config, model):
        self.config = config
        self.model = model
        self.k0 = config.k0_diag()
        self.r = np.zeros(dynamics.NV)
        self._integral = np.zeros(dynamics.NV)
        self._prev_f = None
        self._M_prev = None
        self._p0 = None
        self.lam_hat = np.zeros(6)

    def reset(self):
        self.r = np.zeros(dynamics.NV)
        self._integral = np.zeros(dynamics.NV)
        self._prev_f = None
        self._M_prev = None
        self._p0 = None
        self.lam_hat = np.zeros(6)

    def step(self, state, u_j, dt, lam_supplied=None, snap=None,
             grf_impulse=None):
        """Advance the estimate by one sample.

        lam_supplied: measured stacked ground force (6,), required in
        "supplied" mode. grf_impulse: optional generalized ground impulse
        (10,) over the interval since the previous sample; when given in
        supplied mode it replaces the trapezoidal ground term in the
        accumulator (a force-sensor reading integrated over the sample
        interval). Supplied mode integrates with the trapezoidal rule;
        constraint mode uses a fully implicit backward-Euler accumulator
        because the algebraic coupling between the residual and the
        constraint ground force makes any lagged scheme geometrically
        unstable at gains with K0 dt near one.
        """
        if not state.is_finite() or not np.all(np.isfinite(u_j)):
            raise ValueError("non-finite observer measurement")
        if dt <= 0.0:
            raise ValueError("observer step requires dt > 0")
        cfg = self.config
        if snap is None:
            snap = self.model.snapshot(state)
        M, h = snap.M, snap.h
        B_t, B_g, B_j = snap.B_t, snap.B_g, snap.B_j
        u_j = np.asarray(u_j, dtype=float)

        if self._M_prev is None:
            self._M_prev = M
        Mdot = ((M - self._M_prev) / dt if self._prev_f is not None
                else np.zeros_like(M))
        beta = -h + Mdot @ state.v
        p = M @ state.v
        first = self._prev_f is None
        rank, deficient, n_stance = 0, False, 0

        if cfg.mode == "supplied":
            if lam_supplied is None:
                raise ValueError("supplied mode requires a measured ground force")
            lam = np.asarray(lam_supplied, dtype=float).reshape(6)
            use_impulse = grf_impulse is not None
            g_term = beta + B_j @ u_j
            if not use_impulse:
                g_term = g_term + B_g @ lam
            if first:
                # first sample anchors the momentum reference
                self._p0 = p
                self.r = np.zeros(dynamics.NV)
            else:
                half = 0.5 * dt
                extra = (np.asarray(grf_impulse, dtype=float)
                         if use_impulse else 0.0)
                rhs = (p - self._p0 - self._integral - extra
                       - half * (self._prev_f + g_term))
                self.r = (self.k0 * rhs) / (1.0 + half * self.k0)
                self._integral = (self._integral + extra
                                  + half * (self._prev_f + g_term + self.r))
            self._prev_f = g_term + self.r
        else:
            terms = _ConstraintTerms(state, u_j, snap, cfg.sv_cutoff,
                                     cfg.contact_depth)
            rank, deficient = terms.rank, terms.deficient
            n_stance = len(terms.stance)
            if first:
                self._p0 = p
                self.r = np.zeros(dynamics.NV)
                lam = terms.lam(self.r)
            else:
                base = beta + B_j @ u_j
                rhs = p - self._p0 - self._integral - dt * base
                if terms.no_contact:
                    self.r = (self.k0 * rhs) / (1.0 + dt * self.k0)
                    lam = np.zeros(6)
                else:
                    Jsel_T = B_g[:, terms.rows]
                    rhs = rhs - dt * (Jsel_T @ terms.d)
                    kd = dt * self.k0
                    lhs = np.diag(1.0 + kd) - kd[:, None] * (Jsel_T @ terms.G)
                    self.r = np.linalg.solve(lhs, self.k0 * rhs)
                    lam = terms.lam(self.r)
                self._integral = self._integral + dt * (base + B_g @ lam
                                                        + self.r)
            self._prev_f = beta + B_j @ u_j + B_g @ lam + self.r
        self._M_prev = M
        self.lam_hat = lam

        u_t_hat = body_frame_thrust(self.r, state, self.model,
                                    sv_cutoff=cfg.sv_cutoff, snap=snap)
        return ObserverOutput(r=self.r.copy(), u_t_hat=u_t_hat,
                              lam_hat=lam.copy(), rank=rank,
                              deficient=deficient, n_stance=n_stance)
