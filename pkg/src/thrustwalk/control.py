"""Walking controller: parametric gait, inverse kinematics, joint PID,
reduced-order (variable-length inverted pendulum) thruster force about the
CoM, and roll/yaw differential thruster stabilization.

The gait is a parametric cycloidal swing-foot pattern with Raibert-style
foot placement; the stance target is held fixed in the world frame.
"""

from dataclasses import dataclass, field
import numpy as np

from .rotations import rpy_zyx, wrap_angle
from .dynamics import forward_kinematics

MIRROR = np.array([1.0, -1.0, 1.0])


class UnreachableTargetError(ValueError):
    """Raised when an IK target is off the reachable surface.

    Carries the clamped nearest-reachable solution in .solution.
    """

    def __init__(self, message, solution, residual):
        super().__init__(message)
        self.solution = solution
        self.residual = residual


class DegenerateLegError(ValueError):
    """Body coincides with the center of pressure; leg direction undefined."""


@dataclass
class GaitConfig:
    """Parametric walking gait. step_period is the full two-step cycle."""

    step_length: float = 0.12
    step_height: float = 0.05
    step_period: float = 1.6
    body_height_ref: float = 0.73
    duty_factor: float = 0.68
    stance_width: float = 0.33
    ramp_cycles: float = 1.0
    # commanded penetration at landing and through stance; commits contacts
    # so feet do not graze the contact boundary
    press_depth: float = 0.004
    # stance dither: the foot grinds a small circle at constant speed, which
    # keeps the contact in the smooth sliding regime of the friction model
    # instead of the sampled stick-slip limit cycle of the Coulomb term
    dither_radius: float = 0.0012
    dither_freq: float = 6.0

    @property
    def speed(self):
        """Steady walking speed implied by the step geometry."""
        return 2.0 * self.step_length / self.step_period

    def __post_init__(self):
        self.validate()

    def validate(self):
        for name in ("step_length", "step_height", "step_period",
                     "body_height_ref"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"GaitConfig.{name} must be >= 0")
        if not (0.0 < self.duty_factor < 1.0):
            raise ValueError("GaitConfig.duty_factor must be in (0, 1)")


@dataclass
class ControllerGains:
    # hip joint PID (per joint type), torques
    kp_hip_frontal: float = 220.0
    ki_hip_frontal: float = 40.0
    kd_hip_frontal: float = 14.0
    kp_hip_sagittal: float = 60.0
    ki_hip_sagittal: float = 12.0
    kd_hip_sagittal: float = 4.0
    integral_clamp: float = 4.0
    # first-order filter on the measured joint rates in the D term; keeps the
    # friction chatter out of the derivative action
    rate_filter_tau: float = 0.02
    # knee PD, acceleration commands
    kp_knee: float = 40.0
    kd_knee: float = 8.0
    # thruster roll/yaw PD (forces)
    kp_roll: float = 180.0
    kd_roll: float = 25.0
    kp_yaw: float = 100.0
    kd_yaw: float = 20.0
    stab_limit: float = 60.0
    # body pitch regulation through the loaded hips (torque added to the
    # sagittal joints, weighted by the scheduled support share)
    kp_pitch_hip: float = 0.0
    kd_pitch_hip: float = 0.0
    # body pitch regulation through the thruster mount offset: the net
    # thruster force acts above the body origin, so its x component provides
    # the pitch torque the antisymmetric roll/yaw law cannot
    kp_pitch_thrust: float = 0.0
    kd_pitch_thrust: float = 0.0
    # reduced-order model body tracking (accelerations)
    kp_body: np.ndarray = field(default_factory=lambda: np.array([0.0, 18.0, 25.0]))
    kd_body: np.ndarray = field(default_factory=lambda: np.array([4.0, 9.0, 18.0]))
    # leg-length channel
    kp_leg: float = 50.0
    kd_leg: float = 10.0
    # Raibert foot placement
    k_placement: float = 0.08
    k_placement_lat: float = 0.12
    k_pitch_placement: float = 0.0
    # fraction of the support force carried by the thrusters instead of the
    # stance leg (thruster assistance); slowly modulated so the thruster
    # force sweeps a healthy dynamic range for the estimation experiments
    weight_assist: float = 0.35
    weight_assist_mod: float = 0.22
    weight_assist_freq: float = 0.25
    # fraction of the swing window after which the foot has landed and
    # settles before the schedule transfers weight onto it
    swing_complete: float = 0.8

    def __post_init__(self):
        self.kp_body = np.asarray(self.kp_body, dtype=float).reshape(3)
        self.kd_body = np.asarray(self.kd_body, dtype=float).reshape(3)
        self.validate()

    def validate(self):
        import dataclasses
        for f in dataclasses.fields(self):
            val = getattr(self, f.name)
            if np.any(np.asarray(val) < 0.0):
                raise ValueError(f"ControllerGains.{f.name} must be >= 0")


@dataclass
class IkSolution:
    gamma_h: float
    phi_h: float
    phi_k: float
    residual: float


def _leg_geometry(params):
    """(rho, reach_x) of the foot surface around the hip-frontal pivot.

    With the straight-knee chain w0 = l3 + l4, the foot lies on the sphere of
    radius rho about the l1 point, restricted to |x| <= reach_x. Holds for the
    lateral-only l2 of this topology.
    """
    w0 = params.l3 + params.l4
    l2 = params.l2
    rho = np.sqrt(float(l2 @ l2 + w0 @ w0 + 2.0 * l2[1] * w0[1]))
    reach_x = np.hypot(w0[0], w0[2])
    return rho, reach_x


def solve_ik(target_body, params, side="L"):
    """Closest-reachable joint angles for a body-frame foot target.

    Returns an IkSolution whose residual is the distance between the target
    and the foot position actually achieved (zero on the reachable surface).
    The knee does not move the point foot for this topology, so phi_k = 0.
    """
    b = np.asarray(target_body, dtype=float)
    if side == "R":
        sol = solve_ik(b * MIRROR, params, side="L")
        return IkSolution(-sol.gamma_h, sol.phi_h, sol.phi_k, sol.residual)

    rho, reach_x = _leg_geometry(params)
    w0 = params.l3 + params.l4
    rel = b - params.l1

    # project onto the reachable zone of the sphere
    nrel = np.linalg.norm(rel)
    if nrel < 1e-12:
        rel = np.array([0.0, 0.0, -rho])
        nrel = rho
    proj = rel * (rho / nrel)
    x_max = min(reach_x, rho) * (1.0 - 1e-12)
    if abs(proj[0]) > x_max:
        proj_x = np.sign(proj[0]) * x_max
        yz = proj[1:]
        nyz = np.linalg.norm(yz)
        r_yz = np.sqrt(max(rho * rho - proj_x * proj_x, 0.0))
        if nyz < 1e-12:
            yz = np.array([1.0, 0.0])
            nyz = 1.0
        proj = np.concatenate([[proj_x], yz * (r_yz / nyz)])

    # hip sagittal from the x component: w0_x cos(phi) + w0_z sin(phi) = x.
    # Two branches solve it; keep the foot-below one ((Ry(phi) w0)_z <= 0).
    from .rotations import rot_x, rot_y
    amp = np.hypot(w0[0], w0[2])
    psi = np.arctan2(w0[0], w0[2])
    base = np.arcsin(np.clip(proj[0] / amp, -1.0, 1.0))
    candidates = [wrap_angle(base - psi), wrap_angle(np.pi - base - psi)]
    phi = candidates[0]
    if (rot_y(candidates[0]) @ w0)[2] > (rot_y(candidates[1]) @ w0)[2]:
        phi = candidates[1]

    # hip frontal aligns the remaining chain with the target in the y-z plane
    u = params.l2 + rot_y(phi) @ w0
    gamma = wrap_angle(np.arctan2(proj[2], proj[1]) - np.arctan2(u[2], u[1]))

    achieved = params.l1 + rot_x(gamma) @ u
    residual = float(np.linalg.norm(achieved - b))
    return IkSolution(float(gamma), float(phi), 0.0, residual)


def inverse_kinematics(target_body, params, side="L", tol=1e-9):
    """Joint angles reproducing the target exactly; raises on unreachable.

    The raised UnreachableTargetError carries the clamped nearest-reachable
    solution.
    """
    sol = solve_ik(target_body, params, side)
    if sol.residual > tol:
        raise UnreachableTargetError(
            f"foot target {np.asarray(target_body)} off the reachable surface "
            f"by {sol.residual:.3e}", sol, sol.residual)
    return sol


@dataclass
class GaitTargets:
    foot_world: dict
    foot_body: dict
    swing: dict
    body_height_ref: float
    speed: float
    phase: dict


class GaitGenerator:
    """Phase bookkeeping and world-frame foot targets.

    Holds per-leg stance anchors; time-based phasing keeps runs deterministic.
    """

    def __init__(self, config, params, gains):
        self.config = config
        self.params = params
        self.gains = gains
        w = config.stance_width
        self.anchors = {"L": np.array([0.0, w, 0.0]),
                        "R": np.array([0.0, -w, 0.0])}
        self.lift = {side: self.anchors[side].copy() for side in ("L", "R")}
        self._was_swing = {"L": False, "R": False}

    def ramp(self, t):
        T = self.config.step_period * max(self.config.ramp_cycles, 1e-9)
        return float(np.clip(t / T, 0.0, 1.0))

    def leg_phase(self, t, side):
        """Cycle phase in [0, 1); stance is [0, duty), swing the rest.

        The origin sits mid double-support so a standing start carries half
        the weight on each leg.
        """
        T = self.config.step_period
        phase0 = 0.5 * max(self.config.duty_factor - 0.5, 0.0)
        s = (t / T + phase0) % 1.0
        if side == "R":
            s = (s + 0.5) % 1.0
        return s

    def _swing_y(self, pelvis_w, x, z, side_sgn):
        """Lateral foot coordinate on the leg's reach sphere.

        The leg has a fixed pelvis-to-foot distance, so commanded (x, z)
        determine |y - pelvis_y|; swinging the leg outward (circumduction) is
        what lifts the foot. Returns the outward solution.
        """
        rho, _ = _leg_geometry(self.params)
        dx = x - pelvis_w[0]
        dz = z - pelvis_w[2]
        y_sq = rho * rho - dx * dx - dz * dz
        return pelvis_w[1] + side_sgn * np.sqrt(max(y_sq, 1e-6))

    def targets(self, t, state, frames=None):
        cfg, gains = self.config, self.gains
        ramp = self.ramp(t)
        duty = cfg.duty_factor
        T_st = duty * cfg.step_period
        v_des = cfg.speed * ramp
        vx = state.v[0]

        foot_world, foot_body, swing, phase = {}, {}, {}, {}
        for side, sgn in (("L", 1.0), ("R", -1.0)):
            s = self.leg_phase(t, side)
            phase[side] = s
            in_swing = s >= duty
            swing[side] = in_swing
            if in_swing:
                if not self._was_swing[side]:
                    self.lift[side] = self.anchors[side].copy()
                sw = (s - duty) / (1.0 - duty)
                pelvis_w = state.p + state.R @ (self.params.l1
                                                * (MIRROR if side == "R" else 1.0))
                roll, pitch, _ = rpy_zyx(state.R)
                land_x = (state.p[0] + vx * 0.5 * T_st
                          + gains.k_placement * (vx - v_des)
                          + gains.k_pitch_placement * pitch)
                land_x = np.clip(land_x, state.p[0] - 0.26, state.p[0] + 0.26)
                prog = sw - np.sin(2.0 * np.pi * sw) / (2.0 * np.pi)
                x = self.lift[side][0] + (land_x - self.lift[side][0]) * prog
                z = cfg.step_height * ramp * 0.5 * (1.0 - np.cos(2.0 * np.pi * sw))
                z -= cfg.press_depth * np.clip((sw - 0.7) / 0.3, 0.0, 1.0)
                tgt = np.array([x, self._swing_y(pelvis_w, x, z, sgn), z])
                self.anchors[side] = np.array(
                    [land_x,
                     self._swing_y(pelvis_w, land_x, -cfg.press_depth, sgn),
                     -cfg.press_depth])
            else:
                ang = 2.0 * np.pi * cfg.dither_freq * t
                dither = cfg.dither_radius * np.array(
                    [np.cos(ang), sgn * np.sin(ang), 0.0])
                if frames is not None:
                    # the physical foot is always reachable; tracking it keeps
                    # the stance PID from fighting body drift
                    foot = frames.foot_l if side == "L" else frames.foot_r
                    self.anchors[side] = np.array(
                        [foot[0] - dither[0], foot[1] - dither[1],
                         -cfg.press_depth])
                tgt = self.anchors[side] + dither
            self._was_swing[side] = in_swing
            foot_world[side] = tgt
            foot_body[side] = state.R.T @ (tgt - state.p)
        return GaitTargets(foot_world=foot_world, foot_body=foot_body,
                           swing=swing, body_height_ref=cfg.body_height_ref,
                           speed=v_des, phase=phase)


def joint_pid(q_target, state, gains, dt, integral, rate_filt=None):
    """Hip torques and knee acceleration commands from joint-space targets.

    q_target: dict side -> (gamma, phi_h, phi_k). integral: (4,) running
    clamped integral state. rate_filt: (4,) low-passed joint rates for the
    derivative term (None starts the filter at the measured rates). Returns
    (u_j, u_k, integral, rate_filt).
    """
    e = np.array([
        q_target["L"][0] - state.joint[0],
        q_target["R"][0] - state.joint[1],
        q_target["L"][1] - state.joint[2],
        q_target["R"][1] - state.joint[3],
    ])
    integral = np.clip(integral + e * dt,
                       -gains.integral_clamp, gains.integral_clamp)
    rates = state.v[6:10]
    if gains.rate_filter_tau > 0.0:
        if rate_filt is None:
            rate_filt = rates.copy()
        a = dt / (gains.rate_filter_tau + dt)
        rate_filt = rate_filt + a * (rates - rate_filt)
    else:
        rate_filt = rates.copy()
    kp = np.array([gains.kp_hip_frontal, gains.kp_hip_frontal,
                   gains.kp_hip_sagittal, gains.kp_hip_sagittal])
    ki = np.array([gains.ki_hip_frontal, gains.ki_hip_frontal,
                   gains.ki_hip_sagittal, gains.ki_hip_sagittal])
    kd = np.array([gains.kd_hip_frontal, gains.kd_hip_frontal,
                   gains.kd_hip_sagittal, gains.kd_hip_sagittal])
    u_j = kp * e + ki * integral - kd * rate_filt

    e_k = np.array([q_target["L"][2] - state.knee[0],
                    q_target["R"][2] - state.knee[1]])
    u_k = gains.kp_knee * e_k - gains.kd_knee * state.knee_rate
    return u_j, u_k, integral, rate_filt


def center_of_pressure(p_foot_l, p_foot_r, u_g):
    """Ground-force-weighted average foot position; None with no contact."""
    fz = np.array([u_g[2], u_g[5]])
    tot = fz.sum()
    if tot <= 0.0:
        return None
    lam = fz / tot
    return lam[0] * np.asarray(p_foot_l) + lam[1] * np.asarray(p_foot_r)


@dataclass
class VlipRefs:
    body_pos: np.ndarray
    body_vel: np.ndarray
    leg_length: float
    in_contact: bool
    # smooth measured support fraction in [0, 1]; scales the stance-leg share
    # so the thruster force is continuous through contact transitions
    support: float = 1.0
    # thruster share of the support force at this instant
    assist: float = 0.0


def vlip_thruster(state, cop, refs, gains, total_mass, g_vec):
    """Thruster force about the CoM and the leg-length channel command.

    The required total force for the body reference is split into an axial
    component along the leg (carried by the stance constraint, push-only) and
    the remainder, which the thrusters supply. Airborne, the thrusters carry
    everything.
    """
    r_vec = state.p - np.asarray(cop, dtype=float)
    r = float(np.linalg.norm(r_vec))
    if r <= 1e-6:
        raise DegenerateLegError("body position coincides with the CoP")
    rhat = r_vec / r

    a_des = (gains.kp_body * (refs.body_pos - state.p)
             + gains.kd_body * (refs.body_vel - state.v[:3]))
    F = total_mass * (a_des - g_vec)
    lam = max(float(rhat @ F), 0.0) if refs.in_contact else 0.0
    lam *= (1.0 - refs.assist) * refs.support
    u_tc = F - lam * rhat

    rdot = float(rhat @ state.v[:3])
    u_r = gains.kp_leg * (refs.leg_length - r) - gains.kd_leg * rdot
    return u_tc, u_r


def stabilizing_thrust(state, gains, omega=None):
    """Antisymmetric left/right thruster forces tracking zero roll and yaw.

    omega: optional substitute body rates (e.g. low-passed) for the D terms.
    """
    roll, _, yaw = rpy_zyx(state.R)
    om = state.v[3:6] if omega is None else omega
    u_roll = -(gains.kp_roll * roll + gains.kd_roll * om[0])
    u_yaw = gains.kp_yaw * yaw + gains.kd_yaw * om[2]
    if gains.stab_limit > 0.0:
        u_roll = float(np.clip(u_roll, -gains.stab_limit, gains.stab_limit))
        u_yaw = float(np.clip(u_yaw, -gains.stab_limit, gains.stab_limit))
    u_tl = np.array([u_yaw, 0.0, u_roll])
    return u_tl, -u_tl


def combine_thrust(u_tc, u_tl, u_tr):
    """Stacked 6-vector thruster command: half the CoM force per side plus
    the differential stabilizing terms."""
    u_tc = np.asarray(u_tc, dtype=float)
    return np.concatenate([0.5 * u_tc + np.asarray(u_tl, dtype=float),
                           0.5 * u_tc + np.asarray(u_tr, dtype=float)])


@dataclass
class ControlOutput:
    u_j: np.ndarray
    u_k: np.ndarray
    u_t: np.ndarray
    u_tc: np.ndarray
    u_r: float
    cop: np.ndarray
    targets: GaitTargets
    ik_residual: float


class WalkController:
    """Closed-loop walking stack; owns gait anchors and PID integrators.

    Hip torques combine the joint PID with a smooth gravity/support
    feedforward so the PID only handles deviations; the feedforward uses a
    phase-scheduled nominal weight split rather than the measured ground
    force to avoid feeding friction chatter back into the joints.
    """

    def __init__(self, params, ground, gait_config, gains):
        self.params = params
        self.ground = ground
        self.gains = gains
        self.gait = GaitGenerator(gait_config, params, gains)
        self.integral = np.zeros(4)
        self.rate_filt = None
        self.omega_filt = np.zeros(3)
        self.load_filt = np.zeros(2)
        self.last_cop = np.zeros(3)

    def _support_share(self, t):
        """Smooth per-leg share of the body weight over the gait cycle."""
        cfg = self.gait.config
        duty = cfg.duty_factor
        d_ds = max(duty - 0.5, 1e-6)

        def w(s):
            if s >= duty:
                return 0.0
            up = np.clip(s / d_ds, 0.0, 1.0)
            down = np.clip((duty - s) / d_ds, 0.0, 1.0)
            return float(min(up, down, 1.0))

        wl = w(self.gait.leg_phase(t, "L"))
        wr = w(self.gait.leg_phase(t, "R"))
        tot = wl + wr
        if tot <= 0.0:
            return 0.0, 0.0
        return wl / tot, wr / tot

    def _height_ref(self, state, fp, h_gait):
        """Vertical reference consistent with the stance geometry.

        The stance leg is a fixed-length strut, so the reachable body height
        over the planted feet is dictated by geometry; tracking it (minus a
        small press offset) instead of a constant avoids fighting the vault.
        Falls back to the gait reference when unloaded.
        """
        rho, _ = _leg_geometry(self.params)
        total = float(self.load_filt.sum())
        if total < 2.0:
            return h_gait
        num = 0.0
        for i, (side, sgn) in enumerate((("L", 1.0), ("R", -1.0))):
            foot = fp.foot_l if side == "L" else fp.foot_r
            pel = state.p + state.R @ (self.params.l1 * (MIRROR if side == "R" else 1.0))
            dxy2 = (foot[0] - pel[0]) ** 2 + (foot[1] - pel[1]) ** 2
            h_i = (foot[2] + np.sqrt(max(rho * rho - dxy2, 1e-6))
                   + (state.p[2] - pel[2]))
            num += self.load_filt[i] * h_i
        return num / total - 0.004

    def _feedforward(self, t, state, snap=None):
        """Hip torques holding the pose under gravity and nominal support.

        The scheduled weight split is scaled by the low-passed measured foot
        load, so an unloaded leg gets pure gravity compensation instead of a
        push into the ground.
        """
        share_l, share_r = self._support_share(t)
        weight = self.params.total_mass * float(np.linalg.norm(self.params.g))
        loaded = np.clip(self.load_filt / (0.35 * weight), 0.0, 1.0)
        u_g_nom = np.array([0.0, 0.0, share_l * weight * loaded[0],
                            0.0, 0.0, share_r * weight * loaded[1]])
        if snap is None:
            from .dynamics import snapshot
            snap = snapshot(state, self.params)
        return (snap.G - snap.B_g @ u_g_nom)[6:10]

    def update(self, t, state, u_g, dt, snap=None, frames=None):
        if frames is None:
            if snap is not None:
                frames = snap.frames
            else:
                frames = forward_kinematics(state, self.params)
        fp = frames
        tau = self.gains.rate_filter_tau
        a = dt / (tau + dt) if tau > 0.0 else 1.0
        self.omega_filt = self.omega_filt + a * (state.v[3:6] - self.omega_filt)
        self.load_filt = self.load_filt + a * (np.array([u_g[2], u_g[5]])
                                               - self.load_filt)
        cop = center_of_pressure(fp.foot_l, fp.foot_r, u_g)
        in_contact = cop is not None
        if in_contact:
            self.last_cop = cop
        else:
            cop = self.last_cop

        targets = self.gait.targets(t, state, frames=fp)
        ik = {side: solve_ik(targets.foot_body[side], self.params, side)
              for side in ("L", "R")}
        q_target = {side: (ik[side].gamma_h, ik[side].phi_h, ik[side].phi_k)
                    for side in ("L", "R")}
        u_j, u_k, self.integral, self.rate_filt = joint_pid(
            q_target, state, self.gains, dt, self.integral, self.rate_filt)
        u_j = u_j + self._feedforward(t, state, snap=snap)
        share_l, share_r = self._support_share(t)
        _, pitch, _ = rpy_zyx(state.R)
        pitch_corr = (self.gains.kp_pitch_hip * pitch
                      + self.gains.kd_pitch_hip * self.omega_filt[1])
        u_j[2] += share_l * pitch_corr
        u_j[3] += share_r * pitch_corr

        h_ref = self._height_ref(state, fp, targets.body_height_ref)
        p_ref = np.array([state.p[0], 0.0, h_ref])
        v_ref = np.array([targets.speed, 0.0, 0.0])
        r_ref = float(np.linalg.norm(np.array([cop[0], 0.0, h_ref]) - cop))
        scheduled_contact = (share_l + share_r) > 0.0
        assist = self.gains.weight_assist + self.gains.weight_assist_mod \
            * np.sin(2.0 * np.pi * self.gains.weight_assist_freq * t)
        assist = float(np.clip(assist, 0.0, 0.9)) * self.gait.ramp(t)
        refs = VlipRefs(body_pos=p_ref, body_vel=v_ref, leg_length=r_ref,
                        in_contact=scheduled_contact, support=1.0,
                        assist=assist)
        u_tc, u_r = vlip_thruster(state, cop, refs, self.gains,
                                  self.params.total_mass, self.params.g)
        z_mount = 0.5 * (self.params.p_T_L[2] + self.params.p_T_R[2])
        if abs(z_mount) > 1e-6 and (self.gains.kp_pitch_thrust > 0.0
                                    or self.gains.kd_pitch_thrust > 0.0):
            tau_pitch = -(self.gains.kp_pitch_thrust * pitch
                          + self.gains.kd_pitch_thrust * self.omega_filt[1])
            u_tc = u_tc + np.array([tau_pitch / z_mount, 0.0, 0.0])
        u_tl, u_tr = stabilizing_thrust(state, self.gains,
                                        omega=self.omega_filt)
        u_t = combine_thrust(u_tc, u_tl, u_tr)
        return ControlOutput(u_j=u_j, u_k=u_k, u_t=u_t, u_tc=u_tc, u_r=u_r,
                             cop=np.asarray(cop), targets=targets,
                             ik_residual=max(ik["L"].residual, ik["R"].residual))


def nominal_body_height(params, stance_width):
    """Body height above flat ground with feet planted at +-stance_width.

    The leg is a fixed-length chain, so height and stance width are coupled
    through the foot sphere around the hip pivot.
    """
    rho, _ = _leg_geometry(params)
    dy = stance_width - params.l1[1]
    if abs(dy) >= rho:
        raise ValueError("stance width outside the leg workspace")
    return float(-params.l1[2] + np.sqrt(rho * rho - dy * dy))


def standing_pose(params, gait_config, ground=None, penetration=None):
    """Initial double-support standing state, feet at the nominal width.

    The body height follows from the leg geometry; it is dropped by the
    static ground penetration when ground parameters are given.
    """
    w = gait_config.stance_width
    h = nominal_body_height(params, w)
    if penetration is None:
        if ground is not None:
            penetration = (params.total_mass * float(np.linalg.norm(params.g))
                           / (2.0 * ground.k_gp))
        else:
            penetration = 0.0
    from .dynamics import RobotState
    state = RobotState(p=np.array([0.0, 0.0, h - penetration]))
    for side, sgn, gi, pi in (("L", 1.0, 0, 2), ("R", -1.0, 1, 3)):
        target = np.array([0.0, sgn * w, -penetration]) - state.p
        sol = solve_ik(target, params, side)
        state.joint[gi] = sol.gamma_h
        state.joint[pi] = sol.phi_h
    return state
