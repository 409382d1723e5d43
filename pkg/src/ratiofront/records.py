"""CSV writers and readers for trajectories, snapshots and profiles.

Every float is written with 17 significant digits so files round-trip
exactly.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .model import SimState
from .solver import Trajectory

TIMESERIES_COLUMNS = ("t", "h", "g", "u_max", "v_max", "u_at_0", "v_at_0",
                      "h_speed_est", "g_speed_est")
SNAPSHOT_COLUMNS = ("x", "u", "v")
PROFILE_COLUMNS = ("y", "q")


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def _write(path, header, columns):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in zip(*columns):
            w.writerow([fmt(v) for v in row])
    return path


def read_csv(path) -> dict[str, np.ndarray]:
    """Read a numeric CSV written by this module into named columns."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    data = np.array([[float(v) for v in r] for r in body], dtype=float).reshape(len(body), len(header))
    return {name: data[:, i] for i, name in enumerate(header)}


def write_timeseries(traj: Trajectory, path):
    n = traj.times.size
    nan = np.full(n, np.nan)
    g = traj.g_series if traj.g_series is not None else nan
    cols = (traj.times, traj.h_series, g, traj.umax_series,
            traj.vmax_series if traj.vmax_series is not None else nan,
            traj.u0_series, traj.v0_series if traj.v0_series is not None else nan,
            traj.h_speed_series,
            traj.g_speed_series if traj.g_speed_series is not None else nan)
    return _write(path, TIMESERIES_COLUMNS, cols)


def snapshot_columns(state: SimState):
    """Prey-grid columns; the predator is interpolated there and is 0 beyond ``g``."""
    x = state.x_u
    if state.v.size:
        v = np.interp(x, state.x_v, state.v, right=0.0)
    else:
        v = np.zeros_like(x)
    return x, state.u, v


def write_snapshot(state: SimState, path):
    return _write(path, SNAPSHOT_COLUMNS, snapshot_columns(state))


def write_profile(y, q, path):
    return _write(path, PROFILE_COLUMNS, (y, q))
