"""Post-processing of trajectories: speed fits, outcome classification and
checks of the asymptotic statements at finite time."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .equilibrium import closed_form_equilibrium
from .errors import InsufficientData
from .model import ModelParams
from .semiwave import semiwave_speed
from .solver import SPREADING, UNDECIDED, VANISHING, SolverConfig, Trajectory, classify_front

BOTH_SPREAD = "both_spread"
PREY_ONLY = "prey_only"
PRED_ONLY = "pred_only"
BOTH_VANISH = "both_vanish"


# --------------------------------------------------------------------------
# generic clause report


@dataclass
class Clause:
    clause: str
    target: float
    measured: float
    margin: float
    passed: bool | None          # None: not applicable
    note: str = ""


@dataclass
class Report:
    title: str
    clauses: list[Clause] = field(default_factory=list)

    def add(self, *args, **kw) -> Clause:
        cl = Clause(*args, **kw)
        self.clauses.append(cl)
        return cl

    @property
    def passed(self) -> bool:
        return all(c.passed is not False for c in self.clauses)

    def __getitem__(self, name: str) -> Clause:
        for c in self.clauses:
            if c.clause == name:
                return c
        raise KeyError(name)

    def to_text(self) -> str:
        lines = [f"# {self.title}"]
        width = max((len(c.clause) for c in self.clauses), default=0)
        for c in self.clauses:
            verdict = {True: "pass", False: "FAIL", None: "n/a"}[c.passed]
            lines.append(f"{c.clause:<{width}}  target={c.target:.6g}  measured={c.measured:.6g}"
                         f"  margin={c.margin:.3g}  {verdict}" + (f"  ({c.note})" if c.note else ""))
        return "\n".join(lines)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["clause", "target", "measured", "margin", "pass"])
        for c in self.clauses:
            w.writerow([c.clause, f"{c.target:.17g}", f"{c.measured:.17g}", f"{c.margin:.17g}",
                        {True: "true", False: "false", None: "n/a"}[c.passed]])
        return buf.getvalue()


# --------------------------------------------------------------------------
# speed constants


@dataclass(frozen=True)
class SpeedConstants:
    c1: float
    c2: float
    c3: float
    c4: float
    c5: float
    c0: float
    kappa: float

    @classmethod
    def from_params(cls, p: ModelParams, M2: float) -> "SpeedConstants":
        floor = p.lam - p.b / p.m
        c1 = 2.0 * math.sqrt(floor) if floor > 0 else math.nan
        c2 = 2.0 * math.sqrt(p.lam)
        c3 = 2.0 * math.sqrt(p.d)
        c4 = 2.0 * math.sqrt(p.d * (1.0 + p.c))
        if floor > 0:
            kappa = 2.0 * M2 / floor
            c5 = 2.0 * math.sqrt(p.lam - p.b * kappa / (1.0 + p.m * kappa))
        else:
            kappa = c5 = math.nan
        return cls(c1, c2, c3, c4, c5, min(c1, c3), kappa)

    def ordering(self, p: ModelParams) -> dict[str, bool]:
        """Orderings implied by the definitions; the fast-prey chain is only
        required when ``d (1 + c) < lam - b/m``."""
        out = {"c1<=c2": self.c1 <= self.c2, "c3<=c4": self.c3 <= self.c4,
               "c1<c5<c2": self.c1 < self.c5 < self.c2}
        if p.d * (1 + p.c) < p.lam - p.b / p.m:
            out["c3<c4<c1<c2"] = self.c3 < self.c4 < self.c1 < self.c2
        return out

    def in_scope(self, p: ModelParams) -> bool:
        return p.m * p.lam > p.b and all(self.ordering(p).values())


# --------------------------------------------------------------------------
# speed fit


@dataclass(frozen=True)
class SpeedEstimate:
    value: float
    window: tuple[float, float]
    r2: float
    H_est: float
    n: int


def estimate_speed(times, positions, fit_fraction: float = 0.5) -> SpeedEstimate:
    """Least-squares line through the last ``fit_fraction`` of the run.

    The slope estimates the asymptotic front speed and the intercept the
    asymptotic shift ``H`` (descriptive only).
    """
    if not (0 < fit_fraction <= 0.5):
        raise ValueError("fit_fraction must lie in (0, 0.5]")
    t = np.asarray(times, dtype=float)
    s = np.asarray(positions, dtype=float)
    t_end = t[-1]
    t_lo = t_end * (1.0 - fit_fraction)
    m = t >= t_lo
    if m.sum() < 20:
        raise InsufficientData(f"only {int(m.sum())} samples in the tail window")
    tt, ss = t[m], s[m]
    slope, icpt = np.polyfit(tt, ss, 1)
    resid = ss - (slope * tt + icpt)
    ss_res = float(resid @ resid)
    ss_tot = float(((ss - ss.mean()) ** 2).sum())
    if ss_tot <= 1e-300:
        r2 = 1.0 if ss_res <= 1e-24 else 0.0
        slope = 0.0
        icpt = float(ss.mean())
    else:
        r2 = 1.0 - ss_res / ss_tot
    return SpeedEstimate(float(slope), (float(tt[0]), float(tt[-1])), float(r2), float(icpt), int(m.sum()))


# --------------------------------------------------------------------------
# outcome classification


def reference_speeds(p: ModelParams) -> tuple[float, float]:
    """Lower semi-wave speeds used by the spreading rule."""
    floor = p.lam - p.b / p.m
    if p.mu == 0:
        prey = 0.0
    else:
        prey = semiwave_speed(p.mu, 1.0, floor if floor > 0 else p.lam)
    pred = 0.0 if p.rho == 0 else semiwave_speed(p.rho, p.d, 1.0)
    return prey, pred


def spreading_radii(p: ModelParams) -> tuple[float, float]:
    """Front positions past which spreading is certain (prey needs m lam > b)."""
    gap = p.m * p.lam - p.b
    prey = 0.5 * math.pi * math.sqrt(p.m / gap) if gap > 0 else math.inf
    return prey, 0.5 * math.pi * math.sqrt(p.d)


@dataclass
class Outcome:
    outcome: str
    prey: str
    predator: str
    predicted_u: float
    predicted_v: float
    note: str = ""


def classify_outcome(traj: Trajectory, p: ModelParams | None = None,
                     cfg: SolverConfig | None = None) -> Outcome:
    """Classify each species and attach the predicted longtime limit."""
    p = p or traj.params
    cfg = cfg or traj.cfg
    ref_u, ref_v = reference_speeds(p)
    r_u, r_v = spreading_radii(p)
    prey = classify_front(traj.times, traj.h_series, traj.umax_series, cfg.n_u, ref_u, cfg, r_u)
    pred = classify_front(traj.times, traj.g_series, traj.vmax_series, cfg.n_v, ref_v, cfg, r_v)
    if UNDECIDED in (prey, pred):
        return Outcome(UNDECIDED, prey, pred, math.nan, math.nan)
    if prey == SPREADING and pred == SPREADING:
        eq = closed_form_equilibrium(p)
        if eq.regime_ok:
            return Outcome(BOTH_SPREAD, prey, pred, eq.u_star, eq.v_star)
        return Outcome(BOTH_SPREAD, prey, pred, math.nan, math.nan,
                       note="limit given by the kinetic system; closed form out of regime")
    if prey == SPREADING:
        return Outcome(PREY_ONLY, prey, pred, p.lam, 0.0)
    if pred == SPREADING:
        return Outcome(PRED_ONLY, prey, pred, 0.0, 1.0)
    return Outcome(BOTH_VANISH, prey, pred, 0.0, 0.0)


def classify_single(traj: Trajectory) -> str:
    s = traj.single
    ref = semiwave_speed(s["beta"], s["d"], s["theta"])
    radius = 0.5 * math.pi * math.sqrt(s["d"] / s["theta"])
    return classify_front(traj.times, traj.h_series, traj.umax_series, traj.cfg.n_u, ref,
                          traj.cfg, radius)


# --------------------------------------------------------------------------
# ray-region limits


def _on_x(snap_x, snap_w, x):
    return np.interp(x, snap_x, snap_w, right=0.0)


def _floor_clause(rep, name, snap, x, w, speed, front, target, tol, strict=False):
    if not (math.isfinite(speed) and speed > 0):
        rep.add(name, target, math.nan, math.nan, None, note="ray speed <= 0")
        return
    r = speed * snap.t
    m = float(_on_x(x, w, np.linspace(0.0, r, 200)).min())
    ok = m > target if strict else m >= target - tol
    note = f"ray x={r:.4g} beyond front {front:.4g}" if r > front else ""
    rep.add(name, target, m, m - (target - tol), ok, note=note)


def ray_region_check(traj: Trajectory, consts: SpeedConstants, eps: float,
                     tol: float = 0.05, p: ModelParams | None = None) -> Report:
    """Finite-time check of the density limits along rays ``x = c t``.

    Evaluated on the snapshots in the final quarter of the run.
    """
    p = p or traj.params
    rep = Report("ray-region limits")
    snaps = [s for s in traj.snapshots if s.t >= 0.75 * traj.t_end and s.t > 0]
    if not snaps:
        rep.add("snapshots", 1, 0, -1, None, note="no snapshots in final quarter")
        return rep

    # (a) supports stay behind the fastest rays
    mu_gap = max(s.h - (consts.c2 + eps) * s.t for s in snaps)
    rep.add("a_u_zero_beyond_c2", 0.0, mu_gap, -mu_gap, mu_gap <= 0)
    g_gap = max(s.g - (consts.c4 + eps) * s.t for s in snaps)
    rep.add("a_v_zero_beyond_c4", 0.0, g_gap, -g_gap, g_gap <= 0)

    # (b) persistence floors behind the slow rays
    floor_u = p.lam - p.b / p.m
    last = snaps[-1]
    _floor_clause(rep, "b_u_floor", last, last.x_u, last.u, consts.c1 - eps, last.h,
                  floor_u, tol)
    _floor_clause(rep, "b_v_floor", last, last.x_v, last.v, consts.c3 - eps, last.g, 1.0, tol)

    # (b') the intermediate ray c5: strict positivity, and the floor suggested
    # by lam - b kappa / (1 + m kappa)
    if math.isfinite(consts.c5):
        floor5 = p.lam - p.b * consts.kappa / (1.0 + p.m * consts.kappa)
        _floor_clause(rep, "b5_u_positive", last, last.x_u, last.u, consts.c5 - eps, last.h,
                      0.0, 0.0, strict=True)
        _floor_clause(rep, "b5_u_floor", last, last.x_u, last.u, consts.c5 - eps, last.h,
                      floor5, tol)

    # (c) predator alone between the prey and predator rays
    if p.lam < p.d <= 2.0 * math.sqrt(p.lam) + 1.0 and consts.c2 + eps < consts.c3 - eps:
        s = snaps[-1]
        x = np.linspace((consts.c2 + eps) * s.t, (consts.c3 - eps) * s.t, 200)
        dev = float(np.abs(_on_x(s.x_v, s.v, x) - 1.0).max())
        rep.add("c_v_near_one_band", 0.0, dev, tol - dev, dev <= tol)
    else:
        rep.add("c_v_near_one_band", 0.0, math.nan, math.nan, None,
                note="needs lam < d <= 2 sqrt(lam) + 1 and a nonempty band")

    # (d) approach to the coexistence state behind c0
    eq = closed_form_equilibrium(p)
    if eq.regime_ok and consts.c0 > eps:
        devs = []
        for s in snaps:
            x = np.linspace(0.0, (consts.c0 - eps) * s.t, 200)
            du = np.abs(_on_x(s.x_u, s.u, x) - eq.u_star).max()
            dv = np.abs(_on_x(s.x_v, s.v, x) - eq.v_star).max()
            devs.append(float(max(du, dv)))
        steps = np.diff(devs)
        ok = bool(np.all(steps <= 1e-8)) or devs[-1] <= 1e-8
        rep.add("d_approach_equilibrium", 0.0, devs[-1],
                float(-steps.max()) if steps.size else 0.0, ok,
                note=f"deviations {', '.join(f'{d:.3g}' for d in devs)}")
    else:
        rep.add("d_approach_equilibrium", 0.0, math.nan, math.nan, None,
                note="needs 0 < m lam - b < b/c and c0 > eps")
    return rep


# --------------------------------------------------------------------------
# asymptotic speed brackets


def speed_brackets(p: ModelParams) -> dict[str, tuple[float, float]]:
    floor = p.lam - p.b / p.m
    h_hi = semiwave_speed(p.mu, 1.0, p.lam)
    h_lo = semiwave_speed(p.mu, 1.0, floor) if floor > 0 else 0.0
    g_lo = semiwave_speed(p.rho, p.d, 1.0)
    g_hi = semiwave_speed(p.rho, p.d, 1.0 + p.c)
    return {"h": (h_lo, h_hi), "g": (g_lo, g_hi)}


def speed_bounds_check(traj: Trajectory, p: ModelParams | None = None,
                       margin: float = 0.05, fit_fraction: float = 0.5) -> Report:
    """Tail-fit front speeds against their semi-wave brackets widened by ``margin``."""
    p = p or traj.params
    rep = Report("asymptotic speed brackets")
    br = speed_brackets(p)
    for name, series in (("h", traj.h_series), ("g", traj.g_series)):
        lo, hi = br[name]
        est = estimate_speed(traj.times, series, fit_fraction)
        lo_w, hi_w = lo * (1 - margin), hi * (1 + margin)
        m = min(est.value - lo_w, hi_w - est.value)
        rep.add(f"{name}_speed_lower", lo_w, est.value, est.value - lo_w, est.value >= lo_w)
        rep.add(f"{name}_speed_upper", hi_w, est.value, hi_w - est.value, est.value <= hi_w,
                note=f"bracket [{lo:.6g}, {hi:.6g}], margin {m:.3g}")
    return rep
