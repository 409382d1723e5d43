"""Semi-wave speed ``c(beta, d, theta)`` by shooting.

The semi-wave is the monotone solution of::

    d q'' - c q' + q (theta - q) = 0,   q(0) = 0,  q'(0) = c / beta,  q(inf) = theta

with ``0 < c < 2 sqrt(theta d)``.  For a trial speed the trajectory started at
``(0, c/beta)`` either overshoots ``theta`` (the trial speed is too large) or
turns back (``q' < 0``) below ``theta`` (too small).  The speed is found by
bisection between the two behaviours.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DomainError, NoBracket

OVERSHOOT = "overshoot"
TURNAROUND = "turnaround"
AMBIGUOUS = "ambiguous"

_CLASS_EPS = 1e-9
_MAX_HORIZON_DOUBLINGS = 3
_PROFILE_SATURATION = 1e-8


@dataclass(frozen=True)
class SemiWaveQuery:
    beta: float
    d: float
    theta: float

    def __post_init__(self):
        for name in ("beta", "d", "theta"):
            val = getattr(self, name)
            if not (math.isfinite(val) and val > 0):
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True, eq=False)
class SemiWaveSolution:
    """Speed and profile of the semi-wave.

    ``y`` and ``q`` sample the profile on ``[0, y_max]``; beyond ``y_max``
    the profile is treated as saturated at ``theta``.
    """

    query: SemiWaveQuery
    c: float
    y: np.ndarray
    q: np.ndarray
    residual: float
    bracket: tuple[float, float]

    @property
    def y_max(self) -> float:
        return float(self.y[-1])

    @property
    def theta(self) -> float:
        return self.query.theta


def _rhs(c, d, theta):
    def f(_y, s):
        return [s[1], (c * s[1] - s[0] * (theta - s[0])) / d]
    return f


def _integrate(c, q: SemiWaveQuery, horizon, dense=False):
    theta = q.theta

    def overshoot(_y, s):
        return s[0] - theta * (1.0 + _CLASS_EPS)
    overshoot.terminal = True
    overshoot.direction = 1

    def turnaround(_y, s):
        return s[1]
    turnaround.terminal = True
    turnaround.direction = -1

    return solve_ivp(
        _rhs(c, q.d, theta), (0.0, horizon), [0.0, c / q.beta],
        method="DOP853", rtol=1e-11, atol=1e-14 * theta,
        events=[overshoot, turnaround], dense_output=dense,
    )


def classify(c: float, q: SemiWaveQuery, horizon: float) -> str:
    """Classify the trial speed ``c`` by the fate of its trajectory."""
    sol = _integrate(c, q, horizon)
    if sol.t_events[0].size:
        return OVERSHOOT
    if sol.t_events[1].size:
        q_turn = sol.y_events[1][0][0]
        if q_turn < q.theta * (1.0 - _CLASS_EPS):
            return TURNAROUND
    return AMBIGUOUS


def _base_horizon(q: SemiWaveQuery) -> float:
    return 50.0 * math.sqrt(q.d / q.theta)


def _classify_extending(c, q, horizon):
    for _ in range(_MAX_HORIZON_DOUBLINGS + 1):
        kind = classify(c, q, horizon)
        if kind != AMBIGUOUS:
            return kind, horizon
        horizon *= 2.0
    return AMBIGUOUS, horizon / 2.0


def solve_semiwave(query: SemiWaveQuery, tol: float = 1e-10) -> SemiWaveSolution:
    """Solve the semi-wave problem for ``query`` to relative tolerance ``tol``.

    Raises
    ------
    NoBracket
        If the endpoints of ``(eps, 2 sqrt(theta d) - eps)`` do not classify
        as (turnaround, overshoot) even after extending the horizon.
    """
    if not (1e-14 < tol < 1e-2):
        raise ValueError("tol must lie in (1e-14, 1e-2)")
    cmax = 2.0 * math.sqrt(query.theta * query.d)
    horizon = _base_horizon(query)

    lo, hi = 1e-10 * cmax, (1.0 - 1e-10) * cmax
    k_lo, horizon = _classify_extending(lo, query, horizon)
    k_hi, horizon = _classify_extending(hi, query, horizon)
    if k_lo != TURNAROUND or k_hi != OVERSHOOT:
        raise NoBracket(f"endpoint classes ({k_lo}, {k_hi}) for {query}")

    while hi - lo > tol * 0.5 * (hi + lo):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        kind, horizon = _classify_extending(mid, query, horizon)
        if kind == TURNAROUND:
            lo = mid
        elif kind == OVERSHOOT:
            hi = mid
        else:
            # trajectory hugs theta over the whole horizon: resolved as far as possible
            lo = hi = mid
            break

    c = 0.5 * (lo + hi)
    y, prof = _profile(c, query, 2.0 * horizon)
    return SemiWaveSolution(query, c, y, prof, float(query.theta - prof[-1]), (lo, hi))


def _profile(c, query: SemiWaveQuery, horizon, n=4001):
    """Profile samples: the shot trajectory up to where it still tracks the
    stable direction of the saddle at ``theta``, then the linearised tail."""
    theta, d = query.theta, query.d
    sol = _integrate(c, query, horizon, dense=True)
    y_end = sol.t[-1]
    for ev in sol.t_events:
        if ev.size:
            y_end = min(y_end, ev[0])
    # decay rate of theta - q along the stable manifold
    k = 0.5 * (math.sqrt(c * c / (d * d) + 4.0 * theta / d) - c / d)
    yy = np.linspace(0.0, y_end, 20 * n)
    qq, pp = sol.sol(yy)
    gap = theta - qq
    ok = (qq > 0.5 * theta) & (gap > 0) & (pp > 0)
    if np.any(ok):
        mismatch = np.where(ok, np.abs(pp / np.where(ok, gap, 1.0) - k), np.inf)
        i1 = int(np.argmin(mismatch))
    else:
        i1 = int(np.argmax(qq))
    y1, gap1 = yy[i1], max(gap[i1], 0.0)
    y_head = np.linspace(0.0, y1, n)
    q_head = sol.sol(y_head)[0]
    q_head[0] = 0.0
    if gap1 <= theta * _PROFILE_SATURATION:
        return y_head, np.minimum(q_head, theta)
    y_len = math.log(gap1 / (theta * _PROFILE_SATURATION)) / k
    y_tail = y1 + np.linspace(0.0, y_len, n // 4 + 1)[1:]
    q_tail = theta - gap1 * np.exp(-k * (y_tail - y1))
    return np.concatenate([y_head, y_tail]), np.concatenate([q_head, q_tail])


@lru_cache(maxsize=512)
def semiwave_speed(beta: float, d: float, theta: float, tol: float = 1e-10) -> float:
    """Cached speed-only shortcut used by criteria and diagnostics."""
    return solve_semiwave(SemiWaveQuery(beta, d, theta), tol).c


def profile_wave(sol: SemiWaveSolution, x, front: float):
    """Evaluate ``q(front - x)``.

    Linear interpolation of the stored samples keeps the result monotone;
    arguments past ``y_max`` return ``theta``.
    """
    x_arr = np.asarray(x, dtype=float)
    arg = front - x_arr
    if np.any(arg < 0):
        raise DomainError("x must not exceed the front position")
    out = np.interp(arg, sol.y, sol.q, right=sol.theta)
    out = np.where(arg >= sol.y_max, sol.theta, out)
    return float(out) if out.ndim == 0 else out


@dataclass
class MonotonicityReport:
    betas: np.ndarray
    thetas: np.ndarray
    d: float
    speeds: np.ndarray            # shape (len(betas), len(thetas))
    max_violation: float          # largest decrease found (0 if none)
    n_violations: int

    @property
    def passed(self) -> bool:
        return self.n_violations == 0


def speed_monotonicity_check(betas, thetas, d: float = 1.0,
                             tol: float = 1e-10) -> MonotonicityReport:
    """Check that ``c`` strictly increases in ``beta`` and in ``theta`` on a grid."""
    betas = np.sort(np.asarray(betas, dtype=float))
    thetas = np.sort(np.asarray(thetas, dtype=float))
    speeds = np.array([[solve_semiwave(SemiWaveQuery(b, d, th), tol).c for th in thetas]
                       for b in betas])
    diffs = []
    if len(betas) > 1:
        diffs.append(np.diff(speeds, axis=0).ravel())
    if len(thetas) > 1:
        diffs.append(np.diff(speeds, axis=1).ravel())
    if not diffs:
        return MonotonicityReport(betas, thetas, d, speeds, 0.0, 0)
    dd = np.concatenate(diffs)
    bad = dd <= 0.0
    return MonotonicityReport(betas, thetas, d, speeds,
                              float(max(0.0, -dd.min())), int(np.count_nonzero(bad)))
