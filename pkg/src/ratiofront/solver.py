"""Front-fixing finite differences for the two-front system.

Each species is carried on its own normalised grid ``y = x / L(t)`` on
``[0, 1]``, where ``L`` is that species' front.  In these coordinates::

    W_t = D W_yy / L^2 + (y L' / L) W_y + f,      L' = -beta W_y(1) / L

Diffusion is backward Euler (tridiagonal), advection and reaction are
explicit, and the fronts are advanced with the Stefan speed evaluated from
a second-order one-sided difference.  The two species see each other through
piecewise-linear interpolation in physical ``x``, with zero beyond the
other front.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import solve_banded

from .errors import NonFiniteState, StepRejected
from .model import AprioriBounds, InitialData, ModelParams, SimState, apriori_bounds, min_slope
from .model import reaction_terms

log = logging.getLogger(__name__)

SPREADING = "spreading"
VANISHING = "vanishing"
UNDECIDED = "undecided"

_MAX_HALVINGS = 20
_DT_GROWTH = 1.25


@dataclass(frozen=True)
class SolverConfig:
    n_u: int = 257
    n_v: int = 257
    dt_init: float = 1e-3
    t_end: float = 50.0
    cfl_front: float = 0.5
    snapshot_every: float = 10.0
    vanish_eps: float = 1e-3
    growth_window: float = 10.0
    dt_max: float = 0.01
    record_every: float = 0.1
    solver_tol: float = 1e-10

    def __post_init__(self):
        if self.n_u < 64 or self.n_v < 64:
            raise ValueError("n_u and n_v must be at least 64")
        if not (0 < self.cfl_front <= 0.5):
            raise ValueError("cfl_front must lie in (0, 0.5]")
        for name in ("dt_init", "t_end", "snapshot_every", "vanish_eps",
                     "growth_window", "dt_max", "record_every", "solver_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    def replace(self, **changes) -> "SolverConfig":
        return replace(self, **changes)


@dataclass(frozen=True)
class Violation:
    t: float
    quantity: str
    value: float
    bound: float


@dataclass(eq=False)
class Trajectory:
    """Recorded series of a run.

    For single-species runs the ``g``/``v`` series are ``None`` and the
    species is stored in the ``h``/``u`` slots.
    """

    times: np.ndarray
    h_series: np.ndarray
    g_series: np.ndarray | None
    umax_series: np.ndarray
    vmax_series: np.ndarray | None
    u0_series: np.ndarray
    v0_series: np.ndarray | None
    h_speed_series: np.ndarray
    g_speed_series: np.ndarray | None
    snapshots: list[SimState]
    final: SimState
    bounds: AprioriBounds
    violations: list[Violation]
    cfg: SolverConfig
    params: ModelParams | None = None
    single: dict | None = None
    n_steps: int = 0
    n_rejected: int = 0
    n_clamped: int = 0

    @property
    def t_end(self) -> float:
        return float(self.times[-1])


# --------------------------------------------------------------------------
# single-domain building blocks


def front_gradient(w: np.ndarray) -> float:
    """``W_y`` at ``y = 1`` from the last three nodes (``W[-1] = 0``)."""
    dy = 1.0 / (w.size - 1)
    return (3.0 * w[-1] - 4.0 * w[-2] + w[-3]) / (2.0 * dy)


def front_speed(w: np.ndarray, length: float, beta: float) -> float:
    return max(0.0, -beta * front_gradient(w) / length)


def _advance(w, length, speed, diff, rate, dt):
    n = w.size
    dy = 1.0 / (n - 1)
    y = np.linspace(0.0, 1.0, n)
    wy = np.zeros(n)
    wy[1:-1] = (w[2:] - w[:-2]) / (2.0 * dy)
    rhs = w + dt * (rate + (y * speed / length) * wy)
    new_len = length + dt * speed
    r = diff * dt / (new_len * dy) ** 2
    ab = np.zeros((3, n))
    ab[1, :] = 1.0 + 2.0 * r
    ab[0, 2:] = -r
    ab[2, :-2] = -r
    ab[0, 1] = -2.0 * r            # ghost-node reflection at y = 0
    ab[1, -1] = 1.0                # Dirichlet at the front
    ab[2, -2] = 0.0
    rhs[-1] = 0.0
    return solve_banded((1, 1), ab, rhs), new_len


def _clamp(w, tol, label, t):
    neg = w < 0
    if not neg.any():
        return w, 0
    worst = float(w.min())
    if worst < -10.0 * tol:
        log.debug("%s undershoot %.3e at t=%.4f clamped", label, worst, t)
    return np.where(neg, 0.0, w), int(neg.sum())


def _interp_other(x_self, length_other, w_other):
    x_other = np.linspace(0.0, length_other, w_other.size)
    return np.interp(x_self, x_other, w_other, right=0.0)


# --------------------------------------------------------------------------
# generic marching over one or two domains


@dataclass
class _Domain:
    w: np.ndarray
    length: float
    beta: float
    diff: float
    label: str


def _choose_dt(domains, dt_prev, cfg):
    """Nominal step: growth-limited, capped by ``dt_max`` and the front CFL."""
    dt = min(cfg.dt_max, dt_prev * _DT_GROWTH)
    for dom in domains:
        sp = front_speed(dom.w, dom.length, dom.beta)
        if sp > 0:
            cell = dom.length / (dom.w.size - 1)
            dt = min(dt, cfg.cfl_front * cell / sp)
    return max(dt, 1e-14)


def _try_step(domains, rates_fn, dt, cfg, t):
    """Advance all domains by ``dt``; returns new domains or ``None`` if the
    front CFL is violated by the post-step front speeds."""
    rates = rates_fn(domains)
    out = []
    n_clamped = 0
    for dom, rate in zip(domains, rates):
        sp = front_speed(dom.w, dom.length, dom.beta)
        w_new, len_new = _advance(dom.w, dom.length, sp, dom.diff, rate, dt)
        if not (np.all(np.isfinite(w_new)) and math.isfinite(len_new)):
            raise NonFiniteState(f"non-finite {dom.label} at t={t + dt:.6g}",
                                 state=(t, [d.w for d in domains], [d.length for d in domains]))
        w_new, k = _clamp(w_new, cfg.solver_tol, dom.label, t + dt)
        n_clamped += k
        sp_new = front_speed(w_new, len_new, dom.beta)
        cell = len_new / (w_new.size - 1)
        if sp_new * dt > cfg.cfl_front * cell * (1.0 + 1e-12) and sp_new > sp * (1.0 + 1e-12):
            return None, 0
        out.append(_Domain(w_new, len_new, dom.beta, dom.diff, dom.label))
    return out, n_clamped


def _march(domains, rates_fn, cfg, t0, t_stop, dt0):
    """Step from ``t0`` to exactly ``t_stop``.

    Returns (domains, dt_last, n_steps, n_rejected, n_clamped).
    """
    t = t0
    dt = dt0
    n_steps = n_rejected = n_clamped = 0
    eps = 1e-12 * max(1.0, abs(t_stop))
    while t < t_stop - eps:
        dt = _choose_dt(domains, dt, cfg)
        h = min(dt, t_stop - t)
        for _ in range(_MAX_HALVINGS + 1):
            new, k = _try_step(domains, rates_fn, h, cfg, t)
            if new is not None:
                break
            n_rejected += 1
            h *= 0.5
            dt = h
        else:
            raise StepRejected(f"front CFL not met after {_MAX_HALVINGS} halvings at t={t:.6g}")
        domains = new
        n_clamped += k
        t = t_stop if t_stop - (t + h) < eps else t + h
        n_steps += 1
    return domains, dt, n_steps, n_rejected, n_clamped


def _coupled_rates(p: ModelParams):
    def rates(domains):
        du, dv = domains
        x_u = np.linspace(0.0, du.length, du.w.size)
        x_v = np.linspace(0.0, dv.length, dv.w.size)
        v_on_u = _interp_other(x_u, dv.length, dv.w)
        u_on_v = _interp_other(x_v, du.length, du.w)
        fu, _ = reaction_terms(du.w, v_on_u, p)
        _, fv = reaction_terms(u_on_v, dv.w, p)
        return fu, fv
    return rates


def _resample(x_src, w_src, n):
    y = np.linspace(0.0, x_src[-1], n)
    w = np.interp(y, x_src, w_src)
    w[-1] = 0.0
    return w


# --------------------------------------------------------------------------
# public API


def initial_state(p: ModelParams, init: InitialData, cfg: SolverConfig) -> SimState:
    if not (math.isclose(init.h0, p.h0) and math.isclose(init.g0, p.g0)):
        raise ValueError("initial profiles must be sampled on [0, h0] and [0, g0]")
    return SimState(0.0, p.h0, p.g0, _resample(init.x_u, init.u0, cfg.n_u),
                    _resample(init.x_v, init.v0, cfg.n_v))


def step(state: SimState, p: ModelParams, cfg: SolverConfig, dt: float | None = None) -> SimState:
    """One accepted time step of the coupled system.

    ``dt`` defaults to the front-CFL choice capped by ``cfg.dt_max``; a
    rejected step is retried with half the step.
    """
    domains = [_Domain(state.u, state.h, p.mu, 1.0, "u"),
               _Domain(state.v, state.g, p.rho, p.d, "v")]
    if dt is None:
        dt = _choose_dt(domains, cfg.dt_max, cfg)
    rates = _coupled_rates(p)
    for _ in range(_MAX_HALVINGS + 1):
        new, _k = _try_step(domains, rates, dt, cfg, state.t)
        if new is not None:
            return SimState(state.t + dt, new[0].length, new[1].length, new[0].w, new[1].w)
        dt *= 0.5
    raise StepRejected(f"front CFL not met after {_MAX_HALVINGS} halvings at t={state.t:.6g}")


class _Recorder:
    """Collects series rows on the ``record_every`` lattice, snapshots on the
    ``snapshot_every`` lattice, and a-priori bound violations."""

    def __init__(self, cfg: SolverConfig, labels, bounds, speed_bounds):
        self.cfg = cfg
        self.labels = labels
        self.bounds = bounds
        self.speed_bounds = speed_bounds
        self.rows = []
        self.snapshots = []             # (t, [_Domain, ...])
        self.violations: list[Violation] = []
        self._k_snap = 0

    def record_times(self):
        n = int(math.floor(self.cfg.t_end / self.cfg.record_every + 1e-9))
        times = [k * self.cfg.record_every for k in range(1, n + 1)]
        if not times or times[-1] < self.cfg.t_end * (1 - 1e-12):
            times.append(self.cfg.t_end)
        return times

    def take(self, t, domains):
        row = [t]
        for dom in domains:
            row += [dom.length, float(dom.w.max()), float(dom.w[0]),
                    front_speed(dom.w, dom.length, dom.beta)]
        self.rows.append(row)
        self._check(row)
        snap_t = self._k_snap * self.cfg.snapshot_every
        if t >= snap_t - 1e-9 * self.cfg.snapshot_every or t >= self.cfg.t_end:
            self.snapshots.append((t, _freeze(domains)))
            while self._k_snap * self.cfg.snapshot_every <= t + 1e-9 * self.cfg.snapshot_every:
                self._k_snap += 1

    def _check(self, row, slack=0.01):
        t = row[0]
        prev = self.rows[-2] if len(self.rows) > 1 else None
        for i, lab in enumerate(self.labels):
            length, wmax = row[1 + 4 * i], row[2 + 4 * i]
            if wmax > self.bounds[i] * (1 + slack):
                self.violations.append(Violation(t, f"{lab}_max", wmax, self.bounds[i]))
            if prev is None:
                continue
            dl = length - prev[1 + 4 * i]
            dt = t - prev[0]
            if dl < 0:
                self.violations.append(Violation(t, f"{lab}_front_decrease", dl, 0.0))
            elif dt > 0 and dl / dt > self.speed_bounds[i] * (1 + slack):
                self.violations.append(
                    Violation(t, f"{lab}_front_speed", dl / dt, self.speed_bounds[i]))


def _run_domains(domains, rates_fn, cfg, rec: _Recorder):
    rec.take(0.0, domains)
    t, dt = 0.0, cfg.dt_init
    n_steps = n_rej = n_cl = 0
    for t_stop in rec.record_times():
        domains, dt, a, b, c = _march(domains, rates_fn, cfg, t, t_stop, dt)
        n_steps += a
        n_rej += b
        n_cl += c
        t = t_stop
        rec.take(t, domains)
    return domains, n_steps, n_rej, n_cl


def _freeze(domains):
    return [_Domain(d.w.copy(), d.length, d.beta, d.diff, d.label) for d in domains]


def run(p: ModelParams, init: InitialData, cfg: SolverConfig) -> Trajectory:
    """Integrate the coupled system to ``cfg.t_end``."""
    st = initial_state(p, init, cfg)
    bounds = apriori_bounds(p, init)
    domains = [_Domain(st.u, st.h, p.mu, 1.0, "u"), _Domain(st.v, st.g, p.rho, p.d, "v")]
    rec = _Recorder(cfg, ("u", "v"), (bounds.M1, bounds.M2), (bounds.M3, bounds.M4))
    domains, n_steps, n_rej, n_cl = _run_domains(domains, _coupled_rates(p), cfg, rec)
    for v in rec.violations:
        log.warning("a-priori bound violated: t=%.6g %s=%.6g bound=%.6g",
                    v.t, v.quantity, v.value, v.bound)
    rows = np.array(rec.rows)
    snaps = [SimState(t, dd[0].length, dd[1].length, dd[0].w, dd[1].w)
             for t, dd in rec.snapshots]
    final = SimState(float(rows[-1, 0]), domains[0].length, domains[1].length,
                     domains[0].w.copy(), domains[1].w.copy())
    return Trajectory(
        times=rows[:, 0], h_series=rows[:, 1], g_series=rows[:, 5],
        umax_series=rows[:, 2], vmax_series=rows[:, 6],
        u0_series=rows[:, 3], v0_series=rows[:, 7],
        h_speed_series=rows[:, 4], g_speed_series=rows[:, 8],
        snapshots=snaps, final=final, bounds=bounds, violations=rec.violations,
        cfg=cfg, params=p, n_steps=n_steps, n_rejected=n_rej, n_clamped=n_cl,
    )


def run_single_species(theta: float, d: float, beta: float, s0: float, w0,
                       cfg: SolverConfig, x0=None) -> Trajectory:
    """Logistic free-boundary problem ``w_t - d w_xx = w (theta - w)``.

    ``w0`` is either an array sampled on ``x0`` (default: uniform on
    ``[0, s0]``) or a float amplitude for the cosine profile.
    """
    from .model import cosine_profile, _check_profile

    if np.isscalar(w0):
        x0 = np.linspace(0.0, s0, 257)
        w0 = cosine_profile(x0, s0, float(w0))
    else:
        w0 = np.asarray(w0, dtype=float)
        x0 = np.linspace(0.0, s0, w0.size) if x0 is None else np.asarray(x0, dtype=float)
    _check_profile("w0", x0, w0)
    M = max(theta, float(w0.max()))
    M_speed = 2.0 * beta * max(M * math.sqrt(theta / (2.0 * d)), -min_slope(x0, w0))
    bounds = AprioriBounds(M, math.nan, M_speed, math.nan)

    domains = [_Domain(_resample(x0, w0, cfg.n_u), s0, beta, d, "w")]

    def rates(doms):
        w = doms[0].w
        return [w * (theta - w)]

    rec = _Recorder(cfg, ("w",), (M,), (M_speed,))
    domains, n_steps, n_rej, n_cl = _run_domains(domains, rates, cfg, rec)
    rows = np.array(rec.rows)
    snaps = [SimState(t, dd[0].length, math.nan, dd[0].w, np.zeros(0))
             for t, dd in rec.snapshots]
    final = SimState(float(rows[-1, 0]), domains[0].length, math.nan,
                     domains[0].w.copy(), np.zeros(0))
    return Trajectory(
        times=rows[:, 0], h_series=rows[:, 1], g_series=None,
        umax_series=rows[:, 2], vmax_series=None,
        u0_series=rows[:, 3], v0_series=None,
        h_speed_series=rows[:, 4], g_speed_series=None,
        snapshots=snaps, final=final, bounds=bounds, violations=rec.violations,
        cfg=cfg, single=dict(theta=theta, d=d, beta=beta, s0=s0),
        n_steps=n_steps, n_rejected=n_rej, n_clamped=n_cl,
    )


# --------------------------------------------------------------------------
# finite-time classification


def classify_front(times, fronts, max_density, n_nodes: int, ref_speed: float,
                   cfg: SolverConfig, spread_radius: float = math.inf) -> str:
    """Spreading / vanishing / undecided verdict from the tail of a run.

    vanishing: density below ``vanish_eps`` and the front moved less than one
    cell over the last ``growth_window``.  spreading: mean front speed over
    that window above half of ``ref_speed``, or the front has passed
    ``spread_radius`` (a radius beyond which spreading is certain).
    """
    times = np.asarray(times)
    fronts = np.asarray(fronts)
    t_end = times[-1]
    t_lo = max(times[0], t_end - cfg.growth_window)
    window = t_end - t_lo
    if window <= 0:
        return UNDECIDED
    moved = fronts[-1] - float(np.interp(t_lo, times, fronts))
    cell = fronts[-1] / (n_nodes - 1)
    if max_density[-1] < cfg.vanish_eps and moved < cell:
        return VANISHING
    if ref_speed > 0 and moved / window > 0.5 * ref_speed:
        return SPREADING
    if fronts[-1] >= spread_radius and max_density[-1] > 0:
        return SPREADING
    return UNDECIDED
