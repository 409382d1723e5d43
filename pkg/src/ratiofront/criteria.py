"""Spreading/vanishing thresholds and critical front capacities."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, fields

import numpy as np

from .diagnostics import Report, classify_single
from .errors import BadBracket
from .model import ModelParams
from .semiwave import semiwave_speed
from .solver import SPREADING, UNDECIDED, VANISHING, SolverConfig, Trajectory, run_single_species

log = logging.getLogger(__name__)

HALF_PI = 0.5 * math.pi


@dataclass(frozen=True)
class ThresholdReport:
    prey_spread_radius: float
    prey_vanish_radius: float
    pred_spread_radius: float
    pred_vanish_radius: float
    L_s: float
    s_bar_exists: bool
    prey_extinction_regime: bool
    F_membership: bool

    def items(self):
        return [(f.name, getattr(self, f.name)) for f in fields(self)]


def separation_gap(lam: float, s: float) -> float:
    """``2 pi / sqrt(2 lam - s^2)``; NaN when ``s`` is outside ``(0, sqrt(2 lam))``."""
    if s is None or not (0 < s < math.sqrt(2.0 * lam)):
        return math.nan
    return 2.0 * math.pi / math.sqrt(2.0 * lam - s * s)


def thresholds(p: ModelParams, s: float | None = None) -> ThresholdReport:
    """Closed-form radii, the separation gap and the regime flags.

    ``s_bar_exists`` only records that ``s`` lies in ``(0, sqrt(2 lam))``;
    the maximal admissible speed itself depends on the initial data and is
    not computed.
    """
    gap = p.m * p.lam - p.b
    prey_spread = HALF_PI * math.sqrt(p.m / gap) if gap > 0 else math.nan
    L_s = separation_gap(p.lam, s)
    c_prey = semiwave_speed(p.mu, 1.0, p.lam) if p.mu > 0 else 0.0
    c_pred = semiwave_speed(p.rho, p.d, 1.0) if p.rho > 0 else 0.0
    return ThresholdReport(
        prey_spread_radius=prey_spread,
        prey_vanish_radius=HALF_PI * math.sqrt(1.0 / p.lam),
        pred_spread_radius=HALF_PI * math.sqrt(p.d),
        pred_vanish_radius=HALF_PI * math.sqrt(p.d / (1.0 + p.c)),
        L_s=L_s,
        s_bar_exists=not math.isnan(L_s),
        prey_extinction_regime=p.lam ** 2 + p.m * p.lam < p.b,
        F_membership=c_prey < c_pred,
    )


# --------------------------------------------------------------------------
# critical capacity by bisection on simulation outcomes


@dataclass
class CriticalCapacity:
    lower: float
    upper: float
    iterations: int
    inconclusive: bool = False
    history: list[tuple[float, str, float]] = field(default_factory=list)

    @property
    def width(self) -> float:
        return self.upper - self.lower


def _verdict(theta, d, beta, s0, w0, cfg, history, max_doublings=2):
    c = cfg
    for _ in range(max_doublings + 1):
        tr = run_single_species(theta, d, beta, s0, w0, c)
        v = classify_single(tr)
        history.append((beta, v, c.t_end))
        if v != UNDECIDED:
            return v
        c = c.replace(t_end=2.0 * c.t_end)
    return UNDECIDED


def find_critical_capacity(theta: float, d: float, s0: float, w0, bracket, n_bisect: int,
                           cfg: SolverConfig) -> CriticalCapacity:
    """Bisect on the front capacity between a vanishing and a spreading run.

    Runs that end undecided are repeated with ``t_end`` doubled (twice at
    most); a step that stays undecided stops the search and the result is
    flagged ``inconclusive``.
    """
    if s0 >= HALF_PI * math.sqrt(d / theta):
        raise BadBracket("s0 is above the spreading radius: every capacity spreads")
    lo, hi = map(float, bracket)
    if not (0 < lo < hi):
        raise BadBracket("bracket must satisfy 0 < low < high")
    history: list = []
    v_lo = _verdict(theta, d, lo, s0, w0, cfg, history)
    v_hi = _verdict(theta, d, hi, s0, w0, cfg, history)
    if (v_lo, v_hi) != (VANISHING, SPREADING):
        raise BadBracket(f"endpoint verdicts ({v_lo}, {v_hi}), need (vanishing, spreading)")
    it = 0
    for it in range(1, n_bisect + 1):
        mid = 0.5 * (lo + hi)
        v = _verdict(theta, d, mid, s0, w0, cfg, history)
        if v == VANISHING:
            lo = mid
        elif v == SPREADING:
            hi = mid
        else:
            log.warning("bisection step %d at beta=%.6g inconclusive", it, mid)
            return CriticalCapacity(lo, hi, it, True, history)
    return CriticalCapacity(lo, hi, it, False, history)


def scan_bracket(theta, d, s0, w0, cap: CriticalCapacity, cfg: SolverConfig, n: int = 10):
    """Verdicts on ``n`` capacities spread across (and just outside) the final
    bracket; the number of verdict flips should be exactly one."""
    betas = np.linspace(cap.lower, cap.upper, n)
    verdicts = [_verdict(theta, d, float(b), s0, w0, cfg, []) for b in betas]
    flips = sum(1 for a, b in zip(verdicts, verdicts[1:]) if a != b)
    return betas, verdicts, flips


# --------------------------------------------------------------------------
# separation of the fronts


def check_separation(p: ModelParams, s: float, traj: Trajectory) -> Report:
    """Check ``h(t) >= s t + g0 + L_s`` and ``h > g`` on every recorded sample."""
    rep = Report("front separation")
    L_s = separation_gap(p.lam, s)
    if math.isnan(L_s):
        rep.add("applicable", 0.0, s, math.nan, None, note="s outside (0, sqrt(2 lam))")
        return rep
    if not p.h0 - p.g0 > L_s:
        rep.add("applicable", L_s, p.h0 - p.g0, p.h0 - p.g0 - L_s, None,
                note="h0 - g0 <= L_s")
        return rep
    t = traj.times
    lead = traj.h_series - (s * t + p.g0 + L_s)
    order = traj.h_series - traj.g_series
    i_lead = int(np.argmin(lead))
    i_ord = int(np.argmin(order))
    bad = np.nonzero(lead < 0)[0]
    note = f"first violation t={t[bad[0]]:.6g}" if bad.size else f"tightest at t={t[i_lead]:.6g}"
    rep.add("h_ahead_of_ray", 0.0, float(lead[i_lead]), float(lead[i_lead]), bool(lead.min() >= 0),
            note=note)
    rep.add("h_above_g", 0.0, float(order[i_ord]), float(order[i_ord]), bool(order.min() > 0))
    return rep
