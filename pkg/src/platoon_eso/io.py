"""CSV and SVG output."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

from .sim import PlatoonTrajectory

DEFAULT_OUTPUT_PERIOD = 0.01


def trajectory_columns(n_followers):
    cols = ["t"]
    for i in range(n_followers + 1):
        cols += [f"p{i}", f"v{i}", f"a{i}", f"u{i}"]
    cols += [f"e{i}" for i in range(1, n_followers + 1)]
    cols += [f"z2_{i}" for i in range(1, n_followers + 1)]
    cols += [f"ad_{i}" for i in range(1, n_followers + 1)]
    return cols


def output_rows(t, period):
    dt = t[1] - t[0] if len(t) > 1 else period
    step = int(round(period / dt))
    if step < 1 or not math.isclose(step * dt, period, rel_tol=1e-9):
        raise ValueError(f"output period {period} is not a multiple of the step {dt}")
    count = int(math.floor((t[-1] - t[0]) / period + 1e-9)) + 1
    return np.arange(count) * step


def trajectory_table(traj: PlatoonTrajectory, output_period=DEFAULT_OUTPUT_PERIOD):
    rows = output_rows(traj.t, output_period)
    N = traj.n_followers
    veh = np.stack([traj.p, traj.v, traj.a, traj.u], axis=2).reshape(len(traj.t), 4 * (N + 1))
    data = np.column_stack([traj.t, veh, traj.e, traj.z2, traj.ad])
    return trajectory_columns(N), data[rows]


def emit_trajectory_csv(traj: PlatoonTrajectory, path, output_period=DEFAULT_OUTPUT_PERIOD):
    cols, data = trajectory_table(traj, output_period)
    np.savetxt(path, data, fmt="%.9g", delimiter=",", header=",".join(cols), comments="")


def read_trajectory_csv(path):
    """Return ``(columns, data)`` from a file written by :func:`emit_trajectory_csv`."""
    with open(path) as fh:
        cols = fh.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return cols, data


def emit_table_csv(path, columns, rows):
    np.savetxt(path, np.asarray(rows, dtype=float), fmt="%.9g", delimiter=",",
               header=",".join(columns), comments="")


def emit_frequency_csv(path, rows):
    """Rows of ``(omega, |G|, arg G)``."""
    emit_table_csv(path, ["omega", "magnitude", "phase"], rows)


# ------------------------------------------------------------------ svg ----

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf", "#7f7f7f")


def svg_line_chart(path, x, series, title="", xlabel="", ylabel="", logx=False, width=640, height=400):
    """Minimal line chart. ``series`` maps a label to y values sampled on ``x``."""
    x = np.asarray(x, dtype=float)
    xs = np.log10(x) if logx else x
    ys = [np.asarray(v, dtype=float) for v in series.values()]
    ymin = min(float(np.min(y)) for y in ys)
    ymax = max(float(np.max(y)) for y in ys)
    if ymax == ymin:
        ymin, ymax = ymin - 1.0, ymax + 1.0
    left, right, top, bottom = 70, 130, 40, 50
    pw, ph = width - left - right, height - top - bottom
    x0, x1 = float(xs.min()), float(xs.max())
    x1 = x1 if x1 > x0 else x0 + 1.0

    def px(v):
        return left + (v - x0) / (x1 - x0) * pw

    def py(v):
        return top + (ymax - v) / (ymax - ymin) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
           '<rect width="100%" height="100%" fill="white"/>',
           f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
           f'<text x="{width / 2}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>',
           f'<text x="{left + pw / 2}" y="{height - 12}" text-anchor="middle" font-size="12">{escape(xlabel)}</text>',
           f'<text x="16" y="{top + ph / 2}" font-size="12" transform="rotate(-90 16 {top + ph / 2})" '
           f'text-anchor="middle">{escape(ylabel)}</text>']
    for frac in (0.0, 0.5, 1.0):
        yv = ymin + frac * (ymax - ymin)
        xv = x0 + frac * (x1 - x0)
        xt = f"1e{xv:.2g}" if logx else f"{xv:.4g}"
        out.append(f'<text x="{left - 6}" y="{py(yv) + 4:.1f}" text-anchor="end" font-size="10">{yv:.4g}</text>')
        out.append(f'<text x="{px(xv):.1f}" y="{top + ph + 16}" text-anchor="middle" font-size="10">{xt}</text>')
    # thin out long series; the chart is cosmetic
    stride = max(1, len(xs) // 2000)
    for k, (label, y) in enumerate(zip(series, ys)):
        color = _COLORS[k % len(_COLORS)]
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(xs[::stride], y[::stride]))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{pts}"/>')
        ly = top + 14 * (k + 1)
        out.append(f'<line x1="{left + pw + 10}" y1="{ly}" x2="{left + pw + 30}" y2="{ly}" stroke="{color}"/>')
        out.append(f'<text x="{left + pw + 34}" y="{ly + 4}" font-size="10">{escape(str(label))}</text>')
    out.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(out) + "\n")
