"""Normalized RMSE evaluation of observer logs, reproducing the paper-style
per-channel table for the six generalized force/torque channels.
"""

from dataclasses import dataclass, field
import numpy as np

# channel name -> (truth column, estimate column)
CHANNELS = {
    "F_x": ("f_true_Fx[N]", "r_Fx[N]"),
    "F_y": ("f_true_Fy[N]", "r_Fy[N]"),
    "F_z": ("f_true_Fz[N]", "r_Fz[N]"),
    "tau_x": ("f_true_tx[Nm]", "r_tx[Nm]"),
    "tau_y": ("f_true_ty[Nm]", "r_ty[Nm]"),
    "tau_z": ("f_true_tz[Nm]", "r_tz[Nm]"),
}


class EvaluationError(ValueError):
    pass


def nrmse(actual, estimated):
    """Root-mean-square error normalized by the actual signal's range.

    Scale-covariant and translation-invariant; errors on constant actual
    signals (zero range) and length mismatches.
    """
    a = np.asarray(actual, dtype=float)
    e = np.asarray(estimated, dtype=float)
    if a.ndim != 1 or e.ndim != 1:
        raise EvaluationError("nrmse expects one-dimensional series")
    if len(a) != len(e):
        raise EvaluationError(
            f"length mismatch: actual has {len(a)} samples, estimated {len(e)}")
    if len(a) < 2:
        raise EvaluationError("nrmse requires at least two samples")
    span = float(a.max() - a.min())
    if span <= 0.0:
        raise EvaluationError("actual signal is constant; range normalization "
                              "is undefined")
    return float(np.sqrt(np.mean((a - e) ** 2)) / span)


@dataclass
class NrmseReport:
    scenario: str
    mode: str
    t_skip: float
    values: dict = field(default_factory=dict)  # channel -> nrmse

    def rows(self):
        return [(name, self.values[name], self.scenario, self.mode)
                for name in CHANNELS if name in self.values]

    def to_csv(self, path):
        with open(path, "w") as fh:
            fh.write("component,nrmse,scenario,mode\n")
            for name, value, scen, mode in self.rows():
                fh.write(f"{name},{value!r},{scen},{mode}\n")
        return path

    def table(self):
        lines = [f"NRMSE report  scenario={self.scenario}  mode={self.mode}  "
                 f"window t >= {self.t_skip:g} s",
                 f"{'component':>10s}  {'nrmse':>10s}"]
        for name, value, _, _ in self.rows():
            lines.append(f"{name:>10s}  {value:10.6f}")
        return "\n".join(lines)


def evaluate_log(log, t_skip=None):
    """Per-channel NRMSE of the observer estimate against the true
    generalized thruster force, excluding the gait ramp-in window."""
    for name, (ca, ce) in CHANNELS.items():
        for col in (ca, ce):
            if col not in log.data:
                raise EvaluationError(
                    f"log is missing column {col}; was the observer enabled?")
    if t_skip is None:
        t_skip = float(log.meta.get("t_skip", 0.0))
    t = log.t
    mask = t >= t_skip
    if mask.sum() < 2:
        raise EvaluationError(
            f"evaluation window t >= {t_skip:g} s leaves fewer than two samples")
    report = NrmseReport(scenario=log.meta.get("scenario", "?"),
                         mode=log.meta.get("mode", "?"), t_skip=t_skip)
    for name, (ca, ce) in CHANNELS.items():
        report.values[name] = nrmse(log.col(ca)[mask], log.col(ce)[mask])
    return report
