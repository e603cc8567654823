"""Figure families rendered from simulation logs: true vs estimated
generalized forces, ground-model vs constraint-model GRF with rank-deficiency
markers, and robot state traces.
"""

from pathlib import Path
import numpy as np

from .svgplot import Panel, figure_svg
from .evaluate import CHANNELS


class PlotError(ValueError):
    pass


def _require(log, cols):
    missing = [c for c in cols if c not in log.data]
    if missing:
        raise PlotError("log is missing columns: " + ", ".join(missing))


def _downsample(t, *series, max_points=2500):
    n = len(t)
    step = max(1, n // max_points)
    return (t[::step],) + tuple(s[::step] for s in series)


def _deficient_bands(log):
    """(t0, t1) windows where the constraint solve was flagged deficient."""
    if "lam_deficient" not in log.data:
        return []
    t = log.t
    flag = log.col("lam_deficient") > 0.5
    bands = []
    start = None
    for i, f in enumerate(flag):
        if f and start is None:
            start = t[i]
        elif not f and start is not None:
            bands.append((start, t[i]))
            start = None
    if start is not None:
        bands.append((start, t[-1]))
    return bands


def plot_forces(log, path):
    """Six panels: true vs estimated generalized force/torque channels."""
    cols = [c for pair in CHANNELS.values() for c in pair]
    _require(log, ["t[s]"] + cols)
    panels = []
    for name, (ca, ce) in CHANNELS.items():
        t, a, e = _downsample(log.t, log.col(ca), log.col(ce))
        unit = ca.split("[")[1].rstrip("]")
        p = Panel(title=name, xlabel="t [s]", ylabel=f"[{unit}]")
        p.add(t, a, "true")
        p.add(t, e, "estimated")
        panels.append(p)
    svg = figure_svg(panels, ncols=2,
                     title="Generalized thruster force: true vs estimated")
    Path(path).write_text(svg)
    return path


def plot_grf(log, path):
    """Ground-model vs constraint-model GRF per foot and axis; windows where
    the constraint operator was rank-deficient are shaded."""
    cols = ["u_g_Lx[N]", "u_g_Ly[N]", "u_g_Lz[N]",
            "u_g_Rx[N]", "u_g_Ry[N]", "u_g_Rz[N]",
            "lam_Lx[N]", "lam_Ly[N]", "lam_Lz[N]",
            "lam_Rx[N]", "lam_Ry[N]", "lam_Rz[N]"]
    _require(log, ["t[s]"] + cols)
    bands = _deficient_bands(log)
    panels = []
    for foot in ("L", "R"):
        for ax in ("x", "y", "z"):
            t, a, e = _downsample(log.t, log.col(f"u_g_{foot}{ax}[N]"),
                                  log.col(f"lam_{foot}{ax}[N]"))
            p = Panel(title=f"foot {foot}, {ax}", xlabel="t [s]", ylabel="[N]")
            for b in bands:
                p.add_band(*b)
            p.add(t, a, "ground model")
            p.add(t, e, "constraint model")
            panels.append(p)
    svg = figure_svg(panels, ncols=3,
                     title="Ground reaction force: ground model vs "
                           "constraint model (shaded: rank-deficient)")
    Path(path).write_text(svg)
    return path


def plot_states(log, path):
    """Body position, velocity and orientation traces."""
    cols = ["p_B_x[m]", "p_B_y[m]", "p_B_z[m]", "v_x[m/s]", "v_y[m/s]",
            "v_z[m/s]", "roll[rad]", "pitch[rad]", "yaw[rad]"]
    _require(log, ["t[s]"] + cols)
    groups = [("body position", ["p_B_x[m]", "p_B_y[m]", "p_B_z[m]"], "[m]"),
              ("body velocity", ["v_x[m/s]", "v_y[m/s]", "v_z[m/s]"], "[m/s]"),
              ("orientation", ["roll[rad]", "pitch[rad]", "yaw[rad]"], "[rad]")]
    panels = []
    for title, names, unit in groups:
        p = Panel(title=title, xlabel="t [s]", ylabel=unit)
        for c in names:
            t, y = _downsample(log.t, log.col(c))
            p.add(t, y, c.split("[")[0])
        panels.append(p)
    svg = figure_svg(panels, ncols=1, panel_w=840,
                     title="Simulated robot states")
    Path(path).write_text(svg)
    return path


FAMILIES = {"forces": plot_forces, "grf": plot_grf, "states": plot_states}


def render(log, out_dir, selection=("forces", "grf", "states"), stem="log"):
    """Write one SVG per selected figure family; empty selection writes none."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for name in selection:
        if name not in FAMILIES:
            raise PlotError(f"unknown figure family {name!r}; "
                            f"choose from {sorted(FAMILIES)}")
        written.append(FAMILIES[name](log, out_dir / f"{stem}_{name}.svg"))
    return written
