"""Deterministic closed-loop simulation: fixed-step RK4 on the full dynamics
with sampled controls, compliant ground, optional momentum observer, phase
tracking and CSV logging.
"""

from dataclasses import dataclass, field
import numpy as np

from . import dynamics
from .dynamics import RobotState, ModelParams
from .ground import GroundParams, both_feet_grf
from .control import (GaitConfig, ControllerGains, WalkController,
                      standing_pose)
from .observer import ObserverConfig, MomentumObserver, RobotModel
from .rotations import so3_exp, dexpinv, rpy_zyx


class SimulationError(RuntimeError):
    """Raised when a subsystem produces a non-finite value; names the stage."""


@dataclass
class SimConfig:
    dt: float = 1e-3
    duration: float = 5.0
    seed: int = 0
    fall_height: float = 0.1
    fall_tilt: float = 1.0

    def __post_init__(self):
        self.validate()

    def validate(self):
        if not self.dt > 0.0:
            raise ValueError("SimConfig.dt must be > 0")
        if self.duration < self.dt:
            raise ValueError("SimConfig.duration must be >= dt")


@dataclass
class Scenario:
    scenario_id: str = "default"
    model: ModelParams = field(default_factory=ModelParams)
    ground: GroundParams = field(default_factory=GroundParams)
    gait: GaitConfig = field(default_factory=GaitConfig)
    gains: ControllerGains = field(default_factory=ControllerGains)
    observer: ObserverConfig = field(default_factory=ObserverConfig)
    sim: SimConfig = field(default_factory=SimConfig)

    @property
    def t_skip(self):
        """Evaluation window start: one full ramp-in gait cycle."""
        return self.gait.step_period * self.gait.ramp_cycles

    def initial_state(self):
        return standing_pose(self.model, self.gait, self.ground)


def detect_phase(contact_l, contact_r):
    if contact_l and contact_r:
        return "DS"
    if contact_l:
        return "SS-L"
    if contact_r:
        return "SS-R"
    return "flight"


def phase_from_grf(state, u_g):
    """Phase label from the stacked ground force (loaded = nonzero block)."""
    return detect_phase(u_g[2] > 0.0, u_g[5] > 0.0)


# flat ODE vector layout: p(3), theta(3), joint(4), knee(2), v(10), knee_rate(2)
_NY = 24


def _unpack(R0, y):
    return RobotState(p=y[0:3], R=R0 @ so3_exp(y[3:6]), joint=y[6:10],
                      knee=y[10:12], v=y[12:22], knee_rate=y[22:24])


def rk4_step(state, t, dt, deriv):
    """Classical four-stage Runge-Kutta step of the combined ODE.

    deriv(t, state) -> (vdot (10,), knee_acc (2,)). The body orientation is
    carried as a local rotation vector through the exponential map, so every
    stage evaluates on SO(3); the result is re-orthonormalized once.
    """
    R0 = state.R
    y0 = np.concatenate([state.p, np.zeros(3), state.joint, state.knee,
                         state.v, state.knee_rate])

    def f(ti, y):
        st = _unpack(R0, y)
        vdot, kacc = deriv(ti, st)
        vdot = np.asarray(vdot, dtype=float)
        kacc = np.asarray(kacc, dtype=float)
        if not (np.all(np.isfinite(vdot)) and np.all(np.isfinite(kacc))):
            raise SimulationError("dynamics produced a non-finite acceleration")
        dy = np.empty(_NY)
        dy[0:3] = y[12:15]
        dy[3:6] = dexpinv(y[3:6], y[15:18])
        dy[6:10] = y[18:22]
        dy[10:12] = y[22:24]
        dy[12:22] = vdot
        dy[22:24] = kacc
        return dy

    k1 = f(t, y0)
    k2 = f(t + 0.5 * dt, y0 + 0.5 * dt * k1)
    k3 = f(t + 0.5 * dt, y0 + 0.5 * dt * k2)
    k4 = f(t + dt, y0 + dt * k3)
    y1 = y0 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return dynamics.renormalize(_unpack(R0, y1))


def plant_deriv(state, u_j, u_t, u_k, ground, model, grf_record=None):
    """Continuous-time derivative with held controls and live ground forces.

    grf_record: optional list collecting the generalized ground force
    B_g @ u_g at every evaluation (one entry per RK4 stage, in order).
    """
    snap = dynamics.DynSnapshot(state, model)
    u_g = both_feet_grf(state, ground, model, snap=snap)
    if not np.all(np.isfinite(u_g)):
        raise SimulationError("ground model produced a non-finite force")
    if grf_record is not None:
        grf_record.append(snap.B_g @ u_g)
    return dynamics.forward_dynamics(state, u_j, u_t, u_g, u_k, model,
                                     snap=snap)


# SimLog column names; units in brackets where physical
STATE_COLUMNS = (
    ["t[s]", "p_B_x[m]", "p_B_y[m]", "p_B_z[m]",
     "roll[rad]", "pitch[rad]", "yaw[rad]",
     "v_x[m/s]", "v_y[m/s]", "v_z[m/s]",
     "om_x[rad/s]", "om_y[rad/s]", "om_z[rad/s]",
     "gamma_hL[rad]", "gamma_hR[rad]", "phi_hL[rad]", "phi_hR[rad]",
     "dgamma_hL[rad/s]", "dgamma_hR[rad/s]", "dphi_hL[rad/s]", "dphi_hR[rad/s]",
     "phi_kL[rad]", "phi_kR[rad]",
     "u_j_gL[Nm]", "u_j_gR[Nm]", "u_j_pL[Nm]", "u_j_pR[Nm]",
     "u_k_L[rad/s2]", "u_k_R[rad/s2]",
     "u_t_Lx[N]", "u_t_Ly[N]", "u_t_Lz[N]",
     "u_t_Rx[N]", "u_t_Ry[N]", "u_t_Rz[N]",
     "f_true_Fx[N]", "f_true_Fy[N]", "f_true_Fz[N]",
     "f_true_tx[Nm]", "f_true_ty[Nm]", "f_true_tz[Nm]",
     "u_g_Lx[N]", "u_g_Ly[N]", "u_g_Lz[N]",
     "u_g_Rx[N]", "u_g_Ry[N]", "u_g_Rz[N]",
     "cop_x[m]", "cop_y[m]", "cop_z[m]",
     "energy[J]", "work[J]"]
)
OBSERVER_COLUMNS = (
    ["r_Fx[N]", "r_Fy[N]", "r_Fz[N]", "r_tx[Nm]", "r_ty[Nm]", "r_tz[Nm]",
     "r_gL[Nm]", "r_gR[Nm]", "r_pL[Nm]", "r_pR[Nm]",
     "u_hat_Lx[N]", "u_hat_Ly[N]", "u_hat_Lz[N]",
     "u_hat_Rx[N]", "u_hat_Ry[N]", "u_hat_Rz[N]",
     "lam_Lx[N]", "lam_Ly[N]", "lam_Lz[N]",
     "lam_Rx[N]", "lam_Ry[N]", "lam_Rz[N]",
     "lam_rank", "lam_deficient", "n_stance"]
)
META_COLUMNS = ["phase", "scenario", "mode", "t_skip[s]", "fell_at[s]"]


class SimLog:
    """Column store for a simulation run, serializable as a single-header CSV.

    Numeric columns are float arrays; phase/scenario/mode are strings.
    """

    def __init__(self, columns, meta):
        self.columns = list(columns)
        self.meta = dict(meta)
        self.data = {c: [] for c in self.columns}
        self.phase = []
        self.fell_at = float("nan")

    def append(self, values, phase):
        for c, x in zip(self.columns, values):
            self.data[c].append(float(x))
        self.phase.append(phase)

    def finalize(self):
        self.data = {c: np.asarray(v) for c, v in self.data.items()}
        return self

    def __len__(self):
        return len(self.phase)

    def col(self, name):
        return np.asarray(self.data[name])

    @property
    def t(self):
        return self.col("t[s]")

    def to_csv(self, path):
        header = self.columns + META_COLUMNS
        n = len(self)
        scen = self.meta.get("scenario", "default")
        mode = self.meta.get("mode", "off")
        t_skip = self.meta.get("t_skip", 0.0)
        with open(path, "w") as fh:
            fh.write(",".join(header) + "\n")
            cols = [self.data[c] for c in self.columns]
            for i in range(n):
                row = [repr(float(c[i])) for c in cols]
                row.append(self.phase[i])
                row.append(scen)
                row.append(mode)
                row.append(repr(float(t_skip)))
                row.append(repr(float(self.fell_at)))
                fh.write(",".join(row) + "\n")
        return path

    @classmethod
    def from_csv(cls, path):
        with open(path) as fh:
            lines = fh.read().splitlines()
        if not lines:
            raise ValueError(f"{path}: empty log file")
        header = lines[0].split(",")
        ncol = len(header)
        str_cols = {"phase", "scenario", "mode"}
        numeric = [h for h in header if h not in str_cols]
        log = cls(columns=[h for h in header if h not in str_cols
                           and h not in ("t_skip[s]", "fell_at[s]")], meta={})
        raw = {h: [] for h in header}
        for k, line in enumerate(lines[1:], start=2):
            parts = line.split(",")
            if len(parts) != ncol:
                raise ValueError(
                    f"{path}:{k}: length mismatch, expected {ncol} fields, "
                    f"got {len(parts)}")
            for h, val in zip(header, parts):
                raw[h].append(val)
        for h in header:
            if h in str_cols:
                continue
            try:
                values = np.array([float(x) for x in raw[h]])
            except ValueError as e:
                raise ValueError(f"{path}: column {h}: {e}") from None
            if h == "t_skip[s]":
                log.meta["t_skip"] = float(values[0]) if len(values) else 0.0
            elif h == "fell_at[s]":
                log.fell_at = float(values[0]) if len(values) else float("nan")
            else:
                log.data[h] = values
        log.phase = raw.get("phase", [])
        log.meta["scenario"] = raw["scenario"][0] if raw.get("scenario") else "?"
        log.meta["mode"] = raw["mode"][0] if raw.get("mode") else "off"
        return log


def run(scenario, observer_override=None):
    """Closed-loop walking run; returns the finalized SimLog.

    The observer (when enabled) consumes logged quantities only and never
    feeds back into the plant, so truth columns are identical with or
    without it. Terminates early on a detected fall and marks the log.
    """
    model = scenario.model
    ground = scenario.ground
    simc = scenario.sim
    dt = simc.dt
    n_steps = int(round(simc.duration / dt))

    state = scenario.initial_state()
    controller = WalkController(model, ground, scenario.gait, scenario.gains)
    obs_cfg = scenario.observer if observer_override is None else observer_override
    observer = (MomentumObserver(obs_cfg, RobotModel(model))
                if obs_cfg.enabled else None)

    columns = list(STATE_COLUMNS) + (list(OBSERVER_COLUMNS) if observer else [])
    log = SimLog(columns, meta={
        "scenario": scenario.scenario_id,
        "mode": obs_cfg.mode if observer else "off",
        "t_skip": scenario.t_skip,
    })

    work = 0.0
    prev_power = None
    grf_impulse = None
    for k in range(n_steps):
        t = k * dt
        snap = dynamics.DynSnapshot(state, model)
        frames = snap.frames
        u_g = both_feet_grf(state, ground, model, frames=frames)
        if not np.all(np.isfinite(u_g)):
            raise SimulationError("ground model produced a non-finite force")
        cmd = controller.update(t, state, u_g, dt, snap=snap)

        gen_true = snap.B_t @ cmd.u_t
        power = float(state.v @ (snap.B_j @ cmd.u_j + snap.B_t @ cmd.u_t
                                 + snap.B_g @ u_g))
        if prev_power is not None:
            work += 0.5 * dt * (prev_power + power)
        prev_power = power

        roll, pitch, yaw = rpy_zyx(state.R)
        energy = snap.total_energy()
        row = [t, *state.p, roll, pitch, yaw, *state.v[0:3], *state.v[3:6],
               *state.joint, *state.v[6:10], *state.knee,
               *cmd.u_j, *cmd.u_k, *cmd.u_t, *gen_true[:6], *u_g, *cmd.cop,
               energy, work]
        if observer is not None:
            out = observer.step(
                state, cmd.u_j, dt,
                lam_supplied=u_g if obs_cfg.mode == "supplied" else None,
                snap=snap, grf_impulse=grf_impulse)
            row += [*out.r, *out.u_t_hat, *out.lam_hat,
                    out.rank, 1.0 if out.deficient else 0.0, out.n_stance]
        log.append(row, phase_from_grf(state, u_g))

        stage_grf = []
        state = rk4_step(
            state, t, dt,
            lambda ti, st: plant_deriv(st, cmd.u_j, cmd.u_t, cmd.u_k,
                                       ground, model, grf_record=stage_grf))
        if len(stage_grf) == 4:
            # generalized ground impulse the plant received this step
            grf_impulse = (dt / 6.0) * (stage_grf[0] + 2.0 * stage_grf[1]
                                        + 2.0 * stage_grf[2] + stage_grf[3])
        else:
            grf_impulse = None

        roll, pitch, _ = rpy_zyx(state.R)
        if (state.p[2] < simc.fall_height
                or abs(roll) > simc.fall_tilt or abs(pitch) > simc.fall_tilt):
            log.fell_at = (k + 1) * dt
            break
    return log.finalize()
