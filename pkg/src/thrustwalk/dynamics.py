"""Rigid-body kinematics and dynamics of the simplified thruster-assisted biped.

Topology (hard-coded): a floating body with two 2-DoF legs. Each leg chains
body -> l1 -> hip frontal rotation (about x) -> l2 -> hip sagittal rotation
(about y) -> l3 -> knee sagittal rotation (about y) -> l4 -> point foot.
Mass sits at the body, the hip motors and the knee motors; shins and feet are
massless. Knee angles are kinematic states driven by commanded accelerations
and carry no inertia in the generalized coordinates.

Generalized velocity v (10,):
    v[0:3]  world-frame body velocity
    v[3:6]  body-frame angular velocity
    v[6:10] hip joint rates [gamma_L, gamma_R, phi_hL, phi_hR]

All public operations are pure functions of their arguments.
"""

from dataclasses import dataclass, field
import numpy as np

from .rotations import skew, so3_exp, project_so3

NV = 10
MIRROR = np.array([1.0, -1.0, 1.0])
# column indices of the hip coordinates in v, per leg
_JIDX = {"L": (6, 8), "R": (7, 9)}


def _cross(a, b):
    return np.array([a[1] * b[2] - a[2] * b[1],
                     a[2] * b[0] - a[0] * b[2],
                     a[0] * b[1] - a[1] * b[0]])


def _cross_rows(w, V):
    """Cross product of a single vector with each row of V, (n,3)."""
    out = np.empty_like(V)
    out[:, 0] = w[1] * V[:, 2] - w[2] * V[:, 1]
    out[:, 1] = w[2] * V[:, 0] - w[0] * V[:, 2]
    out[:, 2] = w[0] * V[:, 1] - w[1] * V[:, 0]
    return out


def _vec3(x):
    return np.asarray(x, dtype=float).reshape(3).copy()


@dataclass
class ModelParams:
    """Geometry and inertia of the robot; left-leg link offsets, right mirrors y."""

    l1: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.1, -0.1]))
    l2: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.5, 0.0]))
    l3: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, -0.3]))
    l4: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.1, 0.0]))
    m_B: float = 2.0
    m_H: float = 0.5
    m_K: float = 0.5
    I_B: float = 1e-3
    I_H: float = 1e-4
    I_K: float = 1e-4
    p_T_L: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.15, 0.2]))
    p_T_R: np.ndarray = field(default_factory=lambda: np.array([0.0, -0.15, 0.2]))
    g: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, -9.81]))

    def __post_init__(self):
        for name in ("l1", "l2", "l3", "l4", "p_T_L", "p_T_R", "g"):
            setattr(self, name, _vec3(getattr(self, name)))
        self.validate()

    def validate(self):
        for name in ("m_B", "m_H", "m_K"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"ModelParams.{name} must be > 0")
        for name in ("I_B", "I_H", "I_K"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"ModelParams.{name} must be > 0")

    @property
    def total_mass(self):
        return self.m_B + 2.0 * self.m_H + 2.0 * self.m_K

    def link(self, name, side):
        """Link offset vector for a side; the right leg mirrors y."""
        v = getattr(self, name)
        return v if side == "L" else v * MIRROR

    def thruster_offset(self, side):
        return self.p_T_L if side == "L" else self.p_T_R


@dataclass
class RobotState:
    """Full simulation state; see module docstring for the v layout."""

    p: np.ndarray = field(default_factory=lambda: np.zeros(3))
    R: np.ndarray = field(default_factory=lambda: np.eye(3))
    joint: np.ndarray = field(default_factory=lambda: np.zeros(4))
    knee: np.ndarray = field(default_factory=lambda: np.zeros(2))
    v: np.ndarray = field(default_factory=lambda: np.zeros(NV))
    knee_rate: np.ndarray = field(default_factory=lambda: np.zeros(2))

    def __post_init__(self):
        self.p = _vec3(self.p)
        self.R = np.asarray(self.R, dtype=float).reshape(3, 3).copy()
        self.joint = np.asarray(self.joint, dtype=float).reshape(4).copy()
        self.knee = np.asarray(self.knee, dtype=float).reshape(2).copy()
        self.v = np.asarray(self.v, dtype=float).reshape(NV).copy()
        self.knee_rate = np.asarray(self.knee_rate, dtype=float).reshape(2).copy()

    # named views, order [gamma_L, gamma_R, phi_hL, phi_hR]
    @property
    def gamma_hL(self):
        return self.joint[0]

    @property
    def gamma_hR(self):
        return self.joint[1]

    @property
    def phi_hL(self):
        return self.joint[2]

    @property
    def phi_hR(self):
        return self.joint[3]

    @property
    def omega(self):
        return self.v[3:6]

    def copy(self):
        return RobotState(self.p, self.R, self.joint, self.knee, self.v,
                          self.knee_rate)

    def is_finite(self):
        return all(np.all(np.isfinite(a)) for a in
                   (self.p, self.R, self.joint, self.knee, self.v, self.knee_rate))

    def orthonormality_error(self):
        return float(np.max(np.abs(self.R.T @ self.R - np.eye(3))))


def state_advance(state, dt):
    """Advance the configuration along the current rates (first order).

    Used by finite-difference oracles; the simulator integrates with RK4.
    """
    return RobotState(
        p=state.p + dt * state.v[:3],
        R=state.R @ so3_exp(dt * state.v[3:6]),
        joint=state.joint + dt * state.v[6:10],
        knee=state.knee + dt * state.knee_rate,
        v=state.v,
        knee_rate=state.knee_rate,
    )


def _rx(a, v):
    """rot_x(a) @ v without building the matrix."""
    c, s = np.cos(a), np.sin(a)
    return np.array([v[0], c * v[1] - s * v[2], s * v[1] + c * v[2]])


def _drx(a, v):
    c, s = np.cos(a), np.sin(a)
    return np.array([0.0, -s * v[1] - c * v[2], c * v[1] - s * v[2]])


def _ddrx(a, v):
    c, s = np.cos(a), np.sin(a)
    return np.array([0.0, -c * v[1] + s * v[2], -s * v[1] - c * v[2]])


def _ry(a, v):
    c, s = np.cos(a), np.sin(a)
    return np.array([c * v[0] + s * v[2], v[1], -s * v[0] + c * v[2]])


def _dry(a, v):
    c, s = np.cos(a), np.sin(a)
    return np.array([-s * v[0] + c * v[2], 0.0, -c * v[0] - s * v[2]])


def _ddry(a, v):
    c, s = np.cos(a), np.sin(a)
    return np.array([-c * v[0] - s * v[2], 0.0, s * v[0] - c * v[2]])


def _t_rx(c, s, v):
    return (v[0], c * v[1] - s * v[2], s * v[1] + c * v[2])


def _t_drx(c, s, v):
    return (0.0, -s * v[1] - c * v[2], c * v[1] - s * v[2])


def _t_ddrx(c, s, v):
    return (0.0, -c * v[1] + s * v[2], -s * v[1] - c * v[2])


def _t_ry(c, s, v):
    return (c * v[0] + s * v[2], v[1], -s * v[0] + c * v[2])


def _t_dry(c, s, v):
    return (-s * v[0] + c * v[2], 0.0, -c * v[0] - s * v[2])


def _t_ddry(c, s, v):
    return (-c * v[0] - s * v[2], 0.0, s * v[0] - c * v[2])


def _t_add(a, b):
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2])


def _t_scale(k, a):
    return (k * a[0], k * a[1], k * a[2])


class _LegKin:
    """Per-leg chain quantities in the body frame.

    Computed in scalar tuple arithmetic and materialized into one array; the
    named attributes are row views of that buffer.
    """

    __slots__ = ("buf", "s_hip", "s_knee", "s_foot",
                 "c_hip_g", "c_knee_g", "c_knee_p",
                 "c_foot_g", "c_foot_p", "c_foot_k",
                 "sd_hip", "sd_knee", "sd_foot",
                 "cd_hip_g", "cd_knee_g", "cd_knee_p", "cd_foot_g", "cd_foot_p",
                 "jidx")

    def __init__(self, params, side, gamma, phi, knee, gamma_d, phi_d, knee_d):
        sgn = 1.0 if side == "L" else -1.0
        l1 = (params.l1[0], sgn * params.l1[1], params.l1[2])
        l2 = (params.l2[0], sgn * params.l2[1], params.l2[2])
        l3 = (params.l3[0], sgn * params.l3[1], params.l3[2])
        l4 = (params.l4[0], sgn * params.l4[1], params.l4[2])
        cg, sg = np.cos(gamma), np.sin(gamma)
        cp, sp = np.cos(phi), np.sin(phi)
        ck, sk = np.cos(knee), np.sin(knee)

        w = _t_add(l3, _t_ry(ck, sk, l4))
        u = _t_add(l2, _t_ry(cp, sp, w))
        uk = _t_add(l2, _t_ry(cp, sp, l3))

        s_hip = _t_add(l1, _t_rx(cg, sg, l2))
        s_knee = _t_add(l1, _t_rx(cg, sg, uk))
        s_foot = _t_add(l1, _t_rx(cg, sg, u))

        c_hip_g = _t_drx(cg, sg, l2)
        c_knee_g = _t_drx(cg, sg, uk)
        dry_l3 = _t_dry(cp, sp, l3)
        dry_w = _t_dry(cp, sp, w)
        c_knee_p = _t_rx(cg, sg, dry_l3)
        c_foot_g = _t_drx(cg, sg, u)
        c_foot_p = _t_rx(cg, sg, dry_w)
        c_foot_k = _t_rx(cg, sg, _t_ry(cp, sp, _t_dry(ck, sk, l4)))

        wd = _t_scale(knee_d, _t_dry(ck, sk, l4))
        ud = _t_add(_t_scale(phi_d, dry_w), _t_ry(cp, sp, wd))
        ukd = _t_scale(phi_d, dry_l3)
        sd_hip = _t_scale(gamma_d, c_hip_g)
        sd_knee = _t_add(_t_scale(gamma_d, c_knee_g), _t_rx(cg, sg, ukd))
        sd_foot = _t_add(_t_scale(gamma_d, c_foot_g), _t_rx(cg, sg, ud))

        cd_hip_g = _t_scale(gamma_d, _t_ddrx(cg, sg, l2))
        cd_knee_g = _t_add(_t_scale(gamma_d, _t_ddrx(cg, sg, uk)),
                           _t_drx(cg, sg, ukd))
        cd_knee_p = _t_add(_t_scale(gamma_d, _t_drx(cg, sg, dry_l3)),
                           _t_rx(cg, sg, _t_scale(phi_d, _t_ddry(cp, sp, l3))))
        cd_foot_g = _t_add(_t_scale(gamma_d, _t_ddrx(cg, sg, u)),
                           _t_drx(cg, sg, ud))
        cd_foot_p = _t_add(
            _t_scale(gamma_d, _t_drx(cg, sg, dry_w)),
            _t_rx(cg, sg, _t_add(_t_scale(phi_d, _t_ddry(cp, sp, w)),
                                 _t_dry(cp, sp, wd))))

        buf = np.array([s_hip, s_knee, s_foot,
                        c_hip_g, c_knee_g, c_knee_p,
                        c_foot_g, c_foot_p, c_foot_k,
                        sd_hip, sd_knee, sd_foot,
                        cd_hip_g, cd_knee_g, cd_knee_p, cd_foot_g, cd_foot_p])
        self.buf = buf
        (self.s_hip, self.s_knee, self.s_foot,
         self.c_hip_g, self.c_knee_g, self.c_knee_p,
         self.c_foot_g, self.c_foot_p, self.c_foot_k,
         self.sd_hip, self.sd_knee, self.sd_foot,
         self.cd_hip_g, self.cd_knee_g, self.cd_knee_p,
         self.cd_foot_g, self.cd_foot_p) = buf
        self.jidx = _JIDX[side]


class _Kin:
    """Whole-robot kinematic snapshot shared by the dynamics operations."""

    __slots__ = ("R", "omega", "legs")

    def __init__(self, state, params):
        self.R = state.R
        self.omega = state.v[3:6]
        j, jd = state.joint, state.v[6:10]
        self.legs = {
            "L": _LegKin(params, "L", j[0], j[2], state.knee[0],
                         jd[0], jd[2], state.knee_rate[0]),
            "R": _LegKin(params, "R", j[1], j[3], state.knee[1],
                         jd[1], jd[3], state.knee_rate[1]),
        }

    def mass_points(self, params):
        """(mass, s, sd, [(v-index, col, col_dot), ...]) per point mass."""
        out = []
        for side in ("L", "R"):
            leg = self.legs[side]
            ig, ip = leg.jidx
            out.append((params.m_H, leg.s_hip, leg.sd_hip,
                        [(ig, leg.c_hip_g, leg.cd_hip_g)]))
            out.append((params.m_K, leg.s_knee, leg.sd_knee,
                        [(ig, leg.c_knee_g, leg.cd_knee_g),
                         (ip, leg.c_knee_p, leg.cd_knee_p)]))
        return out

    def point_jacobian(self, s, cols):
        """3x10 world Jacobian of a body-chain point.

        cols: list of (v-index, body-frame column vector).
        """
        J = np.zeros((3, NV))
        J[0, 0] = J[1, 1] = J[2, 2] = 1.0
        J[:, 3:6] = -self.R @ skew(s)
        for idx, c in cols:
            J[:, idx] = self.R @ c
        return J

    def point_jacobian_dot(self, s, sd, cols):
        """Time derivative of point_jacobian along the current rates.

        cols: list of (v-index, body column, body column time derivative).
        """
        W = skew(self.omega)
        Jd = np.zeros((3, NV))
        Jd[:, 3:6] = -self.R @ (W @ skew(s) + skew(sd))
        for idx, c, cd in cols:
            Jd[:, idx] = self.R @ (_cross(self.omega, c) + cd)
        return Jd

    def mass_jacobian_pairs(self, params):
        """(mass, J, Jdot) for the four motor point masses."""
        out = []
        for m, s, sd, cols in self.mass_points(params):
            out.append((m,
                        self.point_jacobian(s, [(i, c) for i, c, _ in cols]),
                        self.point_jacobian_dot(s, sd, cols)))
        return out

    def mass_jacobians(self, params):
        return [(m, J) for m, J, _ in self.mass_jacobian_pairs(params)]

    def foot_jacobian(self, side):
        leg = self.legs[side]
        ig, ip = leg.jidx
        return self.point_jacobian(leg.s_foot,
                                   [(ig, leg.c_foot_g), (ip, leg.c_foot_p)])

    def foot_jacobian_dot(self, side):
        leg = self.legs[side]
        ig, ip = leg.jidx
        return self.point_jacobian_dot(leg.s_foot, leg.sd_foot,
                                       [(ig, leg.c_foot_g, leg.cd_foot_g),
                                        (ip, leg.c_foot_p, leg.cd_foot_p)])

    def thruster_jacobian(self, params, side):
        return self.point_jacobian(params.thruster_offset(side), [])


@dataclass
class FramePositions:
    """World positions and velocities of the notable frames."""

    hip_l: np.ndarray
    hip_r: np.ndarray
    knee_l: np.ndarray
    knee_r: np.ndarray
    foot_l: np.ndarray
    foot_r: np.ndarray
    thruster_l: np.ndarray
    thruster_r: np.ndarray
    com: np.ndarray
    hip_l_vel: np.ndarray
    hip_r_vel: np.ndarray
    knee_l_vel: np.ndarray
    knee_r_vel: np.ndarray
    foot_l_vel: np.ndarray
    foot_r_vel: np.ndarray
    thruster_l_vel: np.ndarray
    thruster_r_vel: np.ndarray
    com_vel: np.ndarray

    def foot(self, side):
        return self.foot_l if side == "L" else self.foot_r

    def foot_vel(self, side):
        return self.foot_l_vel if side == "L" else self.foot_r_vel


def forward_kinematics(state, params, kin=None):
    """World positions and velocities of hips, knees, feet, thrusters, CoM.

    Velocities are exact, including the (normally inert) knee-rate terms in
    the foot velocity.
    """
    if kin is None:
        kin = _Kin(state, params)
    R, p, w = state.R, state.p, state.v[3:6]
    pd = state.v[:3]
    legL, legR = kin.legs["L"], kin.legs["R"]

    # rows: hipL, kneeL, footL, thrL, hipR, kneeR, footR, thrR
    S = np.stack([legL.s_hip, legL.s_knee, legL.s_foot, params.p_T_L,
                  legR.s_hip, legR.s_knee, legR.s_foot, params.p_T_R])
    Z = np.zeros(3)
    Sd = np.stack([legL.sd_hip, legL.sd_knee,
                   legL.sd_foot + state.knee_rate[0] * legL.c_foot_k, Z,
                   legR.sd_hip, legR.sd_knee,
                   legR.sd_foot + state.knee_rate[1] * legR.c_foot_k, Z])
    pos = p + S @ R.T
    vel = pd + (_cross_rows(w, S) + Sd) @ R.T

    mtot = params.total_mass
    com = (params.m_B * p
           + params.m_H * (pos[0] + pos[4])
           + params.m_K * (pos[1] + pos[5])) / mtot
    com_vel = (params.m_B * pd
               + params.m_H * (vel[0] + vel[4])
               + params.m_K * (vel[1] + vel[5])) / mtot
    return FramePositions(
        hip_l=pos[0], knee_l=pos[1], foot_l=pos[2], thruster_l=pos[3],
        hip_r=pos[4], knee_r=pos[5], foot_r=pos[6], thruster_r=pos[7],
        hip_l_vel=vel[0], knee_l_vel=vel[1], foot_l_vel=vel[2],
        thruster_l_vel=vel[3],
        hip_r_vel=vel[4], knee_r_vel=vel[5], foot_r_vel=vel[6],
        thruster_r_vel=vel[7],
        com=com, com_vel=com_vel)


class DynSnapshot:
    """Lazily assembled dynamics quantities sharing one chain evaluation.

    The hot loop builds one snapshot per state and reads M, h, the input
    mappings, foot Jacobians and frame kinematics from it. M and h come from
    a fused blockwise assembly over the point masses (Newtonian projection,
    exact for this model).
    """

    __slots__ = ("state", "params", "kin", "_Mh", "_G", "_maps", "_frames",
                 "_J_feet", "_Jd_feet")

    def __init__(self, state, params):
        self.state = state
        self.params = params
        self.kin = _Kin(state, params)
        self._Mh = None
        self._G = None
        self._maps = None
        self._frames = None
        self._J_feet = None
        self._Jd_feet = None

    @staticmethod
    def _skew_batch(V):
        """(n,3) -> (n,3,3) stack of skew matrices."""
        n = V.shape[0]
        S = np.zeros((n, 3, 3))
        S[:, 0, 1] = -V[:, 2]
        S[:, 0, 2] = V[:, 1]
        S[:, 1, 0] = V[:, 2]
        S[:, 1, 2] = -V[:, 0]
        S[:, 2, 0] = -V[:, 1]
        S[:, 2, 1] = V[:, 0]
        return S

    def _assemble(self):
        if self._Mh is not None:
            return self._Mh
        params = self.params
        kin = self.kin
        R = kin.R
        w = kin.omega
        v = self.state.v
        g = params.g
        W = skew(w)
        legL, legR = kin.legs["L"], kin.legs["R"]

        # point order: hip L, knee L, hip R, knee R
        masses = np.array([params.m_H, params.m_K, params.m_H, params.m_K])
        S = np.stack([legL.s_hip, legL.s_knee, legR.s_hip, legR.s_knee])
        Sd = np.stack([legL.sd_hip, legL.sd_knee, legR.sd_hip, legR.sd_knee])
        SK = self._skew_batch(S)
        A = -np.matmul(R, SK)                         # (4,3,3)
        Ad = -np.matmul(R, np.matmul(W, SK) + self._skew_batch(Sd))
        bias = Ad @ w                                 # (4,3)

        # joint columns: (point index, v index, body col, body col rate)
        cols = [(0, 6, legL.c_hip_g, legL.cd_hip_g),
                (1, 6, legL.c_knee_g, legL.cd_knee_g),
                (1, 8, legL.c_knee_p, legL.cd_knee_p),
                (2, 7, legR.c_hip_g, legR.cd_hip_g),
                (3, 7, legR.c_knee_g, legR.cd_knee_g),
                (3, 9, legR.c_knee_p, legR.cd_knee_p)]
        C = np.stack([c for _, _, c, _ in cols])
        CD = np.stack([cd for _, _, _, cd in cols])
        CW = C @ R.T                                  # world cols (6,3)
        CDW = (_cross_rows(w, C) + CD) @ R.T
        for k, (pt, idx, _, _) in enumerate(cols):
            bias[pt] += CDW[k] * v[idx]

        M = np.zeros((NV, NV))
        h = np.zeros(NV)
        mtot = params.total_mass
        M[0, 0] = M[1, 1] = M[2, 2] = mtot
        h[0:3] = -mtot * g + masses @ bias

        mA = masses[:, None, None] * A
        M[0:3, 3:6] = mA.sum(axis=0)
        M[3:6, 3:6] = np.einsum("kji,kjl->il", mA, A)
        M[3, 3] += params.I_B
        M[4, 4] += params.I_B
        M[5, 5] += params.I_B
        bg = bias - g
        h[3:6] = np.einsum("kji,kj->i", mA, bg)

        for k, (pt, idx, _, _) in enumerate(cols):
            m = masses[pt]
            cw = CW[k]
            M[0:3, idx] += m * cw
            M[3:6, idx] += A[pt].T @ (m * cw)
            h[idx] += m * float(cw @ bg[pt])
            for k2, (pt2, idx2, _, _) in enumerate(cols):
                if pt2 == pt and k2 >= k:
                    val = m * float(cw @ CW[k2])
                    M[idx, idx2] += val
                    if idx != idx2:
                        M[idx2, idx] += val
        for i in range(6, 10):
            M[i, i] += params.I_H
        M[3:6, 0:3] = M[0:3, 3:6].T
        M[6:10, 0:3] = M[0:3, 6:10].T
        M[6:10, 3:6] = M[3:6, 6:10].T
        self._Mh = (M, h)
        return self._Mh

    @property
    def M(self):
        return self._assemble()[0]

    @property
    def h(self):
        return self._assemble()[1]

    @property
    def G(self):
        if self._G is None:
            params = self.params
            R = self.kin.R
            g = params.g
            G = np.zeros(NV)
            G[0:3] = -params.total_mass * g
            for m, s, sd, cols in self.kin.mass_points(params):
                A = -R @ skew(s)
                G[3:6] += -m * (A.T @ g)
                for idx, c, _ in cols:
                    G[idx] += -m * float((R @ c) @ g)
            self._G = G
        return self._G

    @property
    def C(self):
        """Coriolis matrix sum(m J^T Jdot); satisfies the power identity."""
        C = np.zeros((NV, NV))
        for m, J, Jd in self.kin.mass_jacobian_pairs(self.params):
            C += m * (J.T @ Jd)
        return C

    def _mappings(self):
        if self._maps is None:
            kin, params = self.kin, self.params
            JTL = kin.thruster_jacobian(params, "L")
            JTR = kin.thruster_jacobian(params, "R")
            B_t = np.hstack([JTL.T, JTR.T])
            B_g = self.J_feet.T.copy()
            B_j = np.zeros((NV, 4))
            B_j[6, 0] = B_j[7, 1] = B_j[8, 2] = B_j[9, 3] = 1.0
            self._maps = (B_t, B_g, B_j)
        return self._maps

    @property
    def B_t(self):
        return self._mappings()[0]

    @property
    def B_g(self):
        return self._mappings()[1]

    @property
    def B_j(self):
        return self._mappings()[2]

    @property
    def J_feet(self):
        if self._J_feet is None:
            self._J_feet = np.vstack([self.kin.foot_jacobian("L"),
                                      self.kin.foot_jacobian("R")])
        return self._J_feet

    @property
    def Jd_feet(self):
        if self._Jd_feet is None:
            self._Jd_feet = np.vstack([self.kin.foot_jacobian_dot("L"),
                                       self.kin.foot_jacobian_dot("R")])
        return self._Jd_feet

    @property
    def frames(self):
        if self._frames is None:
            self._frames = forward_kinematics(self.state, self.params,
                                              kin=self.kin)
        return self._frames

    def foot_kinematics(self):
        """((pos_L, vel_L), (pos_R, vel_R)) world foot states, minimal path."""
        st = self.state
        R, p, w = st.R, st.p, st.v[3:6]
        pd = st.v[:3]
        out = []
        for i, leg in enumerate((self.kin.legs["L"], self.kin.legs["R"])):
            s = leg.s_foot
            sd = leg.sd_foot + st.knee_rate[i] * leg.c_foot_k
            out.append((p + R @ s, pd + R @ (_cross(w, s) + sd)))
        return out

    @property
    def foot_heights(self):
        fp = self.frames
        return np.array([fp.foot_l[2], fp.foot_r[2]])

    def dynamics(self, u_j, u_t, u_g):
        """Generalized acceleration for the given inputs."""
        rhs = (self.B_j @ np.asarray(u_j, float)
               + self.B_t @ np.asarray(u_t, float)
               + self.B_g @ np.asarray(u_g, float) - self.h)
        return np.linalg.solve(self.M, rhs)

    def kinetic_energy(self):
        v = self.state.v
        return 0.5 * float(v @ (self.M @ v))

    def potential_energy(self):
        fp = self.frames
        params = self.params
        pe = -params.m_B * float(params.g @ self.state.p)
        pe -= params.m_H * float(params.g @ (fp.hip_l + fp.hip_r))
        pe -= params.m_K * float(params.g @ (fp.knee_l + fp.knee_r))
        return pe

    def total_energy(self):
        return self.kinetic_energy() + self.potential_energy()


def snapshot(state, params):
    return DynSnapshot(state, params)


def mass_matrix(state, params):
    """Symmetric positive-definite 10x10 generalized mass matrix."""
    return DynSnapshot(state, params).M


def coriolis_matrix(state, params):
    """Coriolis/centrifugal matrix C with h = C v + G.

    Built as sum(m_i J_i^T Jdot_i), which reproduces the Newtonian point-mass
    dynamics exactly and satisfies v^T (Mdot - 2C) v = 0. The body inertia is
    isotropic, so its gyroscopic term vanishes.
    """
    return DynSnapshot(state, params).C


def gravity_forces(state, params):
    """Generalized gravity vector G (the v = 0 value of the bias forces)."""
    return DynSnapshot(state, params).G


def bias_forces(state, params):
    """Coriolis/centrifugal plus gravity bias h, with M vdot + h = Q."""
    return DynSnapshot(state, params).h


def foot_jacobians(state, params):
    """(J_L, J_R), each 3x10, world foot velocity = J v."""
    kin = _Kin(state, params)
    return kin.foot_jacobian("L"), kin.foot_jacobian("R")


def stacked_foot_jacobian(state, params):
    """6x10 stacked [left; right] foot Jacobian."""
    return DynSnapshot(state, params).J_feet


def foot_jacobian_dot(state, params):
    """(Jdot_L, Jdot_R) along the current velocity, each 3x10."""
    kin = _Kin(state, params)
    return kin.foot_jacobian_dot("L"), kin.foot_jacobian_dot("R")


def stacked_foot_jacobian_dot(state, params):
    """6x10 stacked [left; right] foot Jacobian time derivative."""
    return DynSnapshot(state, params).Jd_feet


def thruster_jacobians(state, params):
    kin = _Kin(state, params)
    return (kin.thruster_jacobian(params, "L"),
            kin.thruster_jacobian(params, "R"))


def input_mappings(state, params):
    """(B_t 10x6, B_g 10x6, B_j 10x4) mapping inputs to generalized forces."""
    snap = DynSnapshot(state, params)
    return snap.B_t, snap.B_g, snap.B_j


def forward_dynamics(state, u_j, u_t, u_g, u_k, params, snap=None):
    """Generalized acceleration and knee acceleration.

    u_j: hip torques (4,), u_t: stacked thruster forces (6,), u_g: stacked
    ground forces (6,), u_k: commanded knee accelerations (2,).
    """
    if snap is None:
        snap = DynSnapshot(state, params)
    vdot = snap.dynamics(u_j, u_t, u_g)
    return vdot, np.asarray(u_k, dtype=float).reshape(2).copy()


def kinetic_energy(state, params):
    return DynSnapshot(state, params).kinetic_energy()


def potential_energy(state, params):
    return DynSnapshot(state, params).potential_energy()


def total_energy(state, params):
    return DynSnapshot(state, params).total_energy()


def christoffel_coriolis(state, params, h=1e-6):
    """Coriolis matrix assembled from Christoffel symbols of numerical dM/dq.

    Five-point stencil per coordinate; rotational directions differentiate
    along R exp(eps e_k). Satisfies the skew-symmetry power identity but is
    NOT the dynamics used here: with the body angular velocity as a
    quasi-velocity the construction misses the Lie-bracket terms and breaks
    angular momentum conservation (see tests); kept as the identity
    cross-check.
    """
    def M_at(k, eps):
        s = state.copy()
        if 0 <= k < 3:
            s.p = s.p + eps * np.eye(3)[k]
        elif 3 <= k < 6:
            s.R = s.R @ so3_exp(eps * np.eye(3)[k - 3])
        else:
            s.joint = s.joint.copy()
            s.joint[k - 6] += eps
        return mass_matrix(s, params)

    D = np.zeros((NV, NV, NV))
    for k in range(3, NV):  # M does not depend on body position
        D[k] = (-M_at(k, 2 * h) + 8.0 * M_at(k, h)
                - 8.0 * M_at(k, -h) + M_at(k, -2 * h)) / (12.0 * h)
    v = state.v
    C = 0.5 * (np.einsum("kij,k->ij", D, v)
               + np.einsum("jik,k->ij", D, v)
               - np.einsum("ijk,k->ij", D, v))
    return C


def renormalize(state):
    """Project R back onto SO(3); returns a new state."""
    out = state.copy()
    out.R = project_so3(out.R)
    return out
