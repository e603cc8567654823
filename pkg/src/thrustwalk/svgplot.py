"""Minimal self-contained SVG line plots (no plotting dependency)."""

import numpy as np

_COLORS = ["#1f6fb4", "#d1495b", "#3a9e5f", "#8465a8", "#c98a2b", "#4fb3bf"]


def _nice_ticks(lo, hi, n=5):
    if not np.isfinite(lo) or not np.isfinite(hi):
        lo, hi = 0.0, 1.0
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / max(n, 1)
    mag = 10.0 ** np.floor(np.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        step = mult * mag
        if raw <= step:
            break
    start = np.ceil(lo / step) * step
    ticks = []
    v = start
    while v <= hi + 1e-12 * step:
        ticks.append(0.0 if abs(v) < 1e-12 * step else v)
        v += step
    return ticks


def _fmt(x):
    return f"{x:.6g}"


class Panel:
    """One axes: labelled series plus optional shaded x-bands."""

    def __init__(self, title="", xlabel="", ylabel=""):
        self.title = title
        self.xlabel = xlabel
        self.ylabel = ylabel
        self.series = []
        self.bands = []

    def add(self, x, y, label="", color=None):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        self.series.append((x, y, label, color))
        return self

    def add_band(self, x0, x1, color="#f4c4c4"):
        self.bands.append((float(x0), float(x1), color))
        return self


def _render_panel(p, ox, oy, w, h):
    """SVG fragment for one panel with origin (ox, oy) and size (w, h)."""
    pad_l, pad_r, pad_t, pad_b = 52, 10, 22, 34
    aw, ah = w - pad_l - pad_r, h - pad_t - pad_b
    ax, ay = ox + pad_l, oy + pad_t

    xs = [s[0] for s in p.series if len(s[0])]
    ys = [s[1] for s in p.series if len(s[1])]
    if xs:
        xlo = min(float(np.nanmin(x)) for x in xs)
        xhi = max(float(np.nanmax(x)) for x in xs)
        ylo = min(float(np.nanmin(y)) for y in ys)
        yhi = max(float(np.nanmax(y)) for y in ys)
    else:
        xlo, xhi, ylo, yhi = 0.0, 1.0, 0.0, 1.0
    if xhi <= xlo:
        xhi = xlo + 1.0
    if yhi <= ylo:
        yhi = ylo + 1.0
    yspan = yhi - ylo
    ylo -= 0.05 * yspan
    yhi += 0.05 * yspan

    def X(v):
        return ax + (v - xlo) / (xhi - xlo) * aw

    def Y(v):
        return ay + ah - (v - ylo) / (yhi - ylo) * ah

    out = []
    out.append(f'<rect x="{ax}" y="{ay}" width="{aw}" height="{ah}" '
               'fill="white" stroke="#999" stroke-width="1"/>')
    for x0, x1, color in p.bands:
        cx0, cx1 = max(X(x0), ax), min(X(x1), ax + aw)
        if cx1 > cx0:
            out.append(f'<rect x="{_fmt(cx0)}" y="{ay}" '
                       f'width="{_fmt(cx1 - cx0)}" height="{ah}" '
                       f'fill="{color}" fill-opacity="0.45"/>')
    for tx in _nice_ticks(xlo, xhi):
        out.append(f'<line x1="{_fmt(X(tx))}" y1="{ay + ah}" '
                   f'x2="{_fmt(X(tx))}" y2="{ay + ah + 4}" stroke="#444"/>')
        out.append(f'<text x="{_fmt(X(tx))}" y="{ay + ah + 16}" '
                   f'font-size="10" text-anchor="middle">{_fmt(tx)}</text>')
    for ty in _nice_ticks(ylo, yhi):
        out.append(f'<line x1="{ax - 4}" y1="{_fmt(Y(ty))}" '
                   f'x2="{ax}" y2="{_fmt(Y(ty))}" stroke="#444"/>')
        out.append(f'<text x="{ax - 6}" y="{_fmt(Y(ty) + 3)}" font-size="10" '
                   f'text-anchor="end">{_fmt(ty)}</text>')
    for i, (x, y, label, color) in enumerate(p.series):
        c = color or _COLORS[i % len(_COLORS)]
        ok = np.isfinite(x) & np.isfinite(y)
        pts = " ".join(f"{_fmt(X(a))},{_fmt(Y(b))}"
                       for a, b in zip(x[ok], y[ok]))
        out.append(f'<polyline points="{pts}" fill="none" stroke="{c}" '
                   'stroke-width="1.2"/>')
    # legend
    lx = ax + 8
    for i, (_, _, label, color) in enumerate(p.series):
        if not label:
            continue
        c = color or _COLORS[i % len(_COLORS)]
        ly = ay + 12 + 13 * i
        out.append(f'<line x1="{lx}" y1="{ly - 3}" x2="{lx + 16}" y2="{ly - 3}" '
                   f'stroke="{c}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 20}" y="{ly}" font-size="10">{label}</text>')
    out.append(f'<text x="{ox + w / 2}" y="{oy + 14}" font-size="12" '
               f'text-anchor="middle" font-weight="bold">{p.title}</text>')
    if p.xlabel:
        out.append(f'<text x="{ax + aw / 2}" y="{oy + h - 4}" font-size="11" '
                   f'text-anchor="middle">{p.xlabel}</text>')
    if p.ylabel:
        out.append(f'<text x="{ox + 12}" y="{ay + ah / 2}" font-size="11" '
                   f'text-anchor="middle" '
                   f'transform="rotate(-90 {ox + 12} {ay + ah / 2})">'
                   f'{p.ylabel}</text>')
    return "\n".join(out)


def figure_svg(panels, ncols=2, panel_w=420, panel_h=240, title=""):
    """Complete SVG document laying panels out on a grid."""
    n = len(panels)
    ncols = max(1, min(ncols, n)) if n else 1
    nrows = (n + ncols - 1) // ncols if n else 1
    top = 26 if title else 4
    W = ncols * panel_w + 8
    H = nrows * panel_h + top + 4
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" '
             f'height="{H}" viewBox="0 0 {W} {H}">',
             f'<rect width="{W}" height="{H}" fill="white"/>']
    if title:
        parts.append(f'<text x="{W / 2}" y="18" font-size="14" '
                     f'text-anchor="middle" font-weight="bold">{title}</text>')
    for i, p in enumerate(panels):
        r, c = divmod(i, ncols)
        parts.append(_render_panel(p, 4 + c * panel_w, top + r * panel_h,
                                   panel_w, panel_h))
    parts.append("</svg>")
    return "\n".join(parts)
