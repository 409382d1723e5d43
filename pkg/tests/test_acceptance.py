"""Acceptance criteria, each at its stated tolerance.

Every test records a one-line verdict (shown in the terminal summary and,
with ``-s``, inline) before asserting.
"""

import math

import numpy as np
import pytest

from ratiofront import (InitialData, ModelParams, SemiWaveQuery, SolverConfig, check_separation,
                        classify_outcome, closed_form_equilibrium, estimate_speed,
                        find_critical_capacity, newton_equilibrium, run, run_single_species,
                        solve_semiwave, speed_bounds_check, speed_monotonicity_check)
from ratiofront import cli
from ratiofront.criteria import scan_bracket, separation_gap, thresholds
from ratiofront.diagnostics import BOTH_SPREAD, PREY_ONLY, classify_single
from ratiofront.equilibrium import in_regime, kinetic_residual
from ratiofront.solver import SPREADING, VANISHING

from acceptance_log import record

BENCH = ModelParams(lam=2.0, b=1.0, m=1.0, d=1.0, c=1.0, mu=5.0, rho=5.0, h0=2.5, g0=2.0)
# bisection / scan settings for the single-species dichotomy
DICHOTOMY_CFG = SolverConfig(n_u=129, t_end=60, dt_max=0.02, record_every=0.2, growth_window=10)


@pytest.fixture(scope="module")
def bench_traj():
    return run(BENCH, InitialData.cosine(BENCH), SolverConfig(t_end=50))


# 1 -------------------------------------------------------------------------

def test_c01_semiwave_limits():
    large = solve_semiwave(SemiWaveQuery(1e4, 1.0, 1.0)).c          # sqrt(theta d) = 1
    small = solve_semiwave(SemiWaveQuery(1e-3, 1.0, 1.0)).c
    r_small = small / 1e-3
    ok_large = 1.90 <= large < 2.00
    ok_small = 0.95 / math.sqrt(3) <= r_small <= 1.05 / math.sqrt(3)
    record(1, ok_large and ok_small,
           f"ratio 1e4: c/sqrt(theta d)={large:.6f} in [1.90, 2.00)? {ok_large}; "
           f"ratio 1e-3: c d/(theta beta sqrt(theta d))={r_small:.6f} vs 1/sqrt3 +-5%? {ok_small}")
    assert ok_small
    assert ok_large, f"c/sqrt(theta d) = {large:.6f} at theta beta/d = 1e4"


# 2 -------------------------------------------------------------------------

def test_c02_semiwave_monotonicity():
    rep = speed_monotonicity_check(np.geomspace(0.1, 10, 5), np.geomspace(0.25, 4, 5))
    record(2, rep.passed, f"5x5 grid, violations={rep.n_violations}")
    assert rep.passed


# 3 -------------------------------------------------------------------------

def test_c03_equilibrium_oracle():
    rng = np.random.default_rng(2024)
    worst_rel = worst_res = 0.0
    n = 0
    while n < 100:
        lam, m, c = rng.uniform(0.2, 5), rng.uniform(0.2, 5), rng.uniform(0.05, 5)
        b = rng.uniform(m * lam * c / (1 + c), m * lam)
        if not in_regime(lam, b, m, c):
            continue
        p = ModelParams(lam, b, m, 1.0, c, 1.0, 1.0, 1.0, 1.0)
        eq = closed_form_equilibrium(p, strict=True)
        u, v = newton_equilibrium(p, guess=(eq.u_star * 0.8, eq.v_star * 1.2))
        worst_rel = max(worst_rel, abs(u - eq.u_star) / eq.u_star, abs(v - eq.v_star) / eq.v_star)
        worst_res = max(worst_res, *map(abs, kinetic_residual(eq.u_star, eq.v_star, lam, b, m, c)))
        n += 1
    ok = worst_rel <= 1e-8 and worst_res <= 1e-9
    record(3, ok, f"100 draws, max rel diff={worst_rel:.2e}, max residual={worst_res:.2e}")
    assert ok


# 4 -------------------------------------------------------------------------

def test_c04_logistic_dichotomy():
    half_pi = 0.5 * math.pi
    verdicts = {}
    for beta in (0.1, 1.0, 10.0):
        tr = run_single_species(1.0, 1.0, beta, half_pi, 1.0, DICHOTOMY_CFG)
        verdicts[beta] = classify_single(tr)
    ok_spread = all(v == SPREADING for v in verdicts.values())

    s0 = 0.8 * half_pi
    cap = find_critical_capacity(1.0, 1.0, s0, 1.0, (0.02, 1.0), 8, DICHOTOMY_CFG)
    _, scan, flips = scan_bracket(1.0, 1.0, s0, 1.0, cap, DICHOTOMY_CFG, n=10)
    ok_bis = (not cap.inconclusive) and cap.width < 0.02 and flips == 1
    record(4, ok_spread and ok_bis,
           f"s0=pi/2 verdicts {verdicts}; s0=0.8 pi/2 bracket=({cap.lower:.5f}, {cap.upper:.5f}) "
           f"width={cap.width:.4f}, flips={flips}")
    assert ok_spread and ok_bis


# 5 -------------------------------------------------------------------------

def test_c05_front_speed_vs_semiwave():
    cfg = SolverConfig(n_u=513, t_end=200)
    tr = run_single_species(1.0, 1.0, 5.0, 2.0, 1.0, cfg)
    c = solve_semiwave(SemiWaveQuery(5.0, 1.0, 1.0)).c
    est = estimate_speed(tr.times, tr.h_series)
    rel = abs(est.value - c) / c
    ok = rel < 0.03 and est.r2 >= 0.999
    record(5, ok, f"tail speed={est.value:.5f} vs c={c:.5f} (rel {rel:.2%}), r2={est.r2:.6f}, "
                  f"H_est={est.H_est:.4f}")
    assert ok


# 6, 7 ----------------------------------------------------------------------

def test_c06_apriori_bounds(bench_traj):
    n = len(bench_traj.violations)
    record(6, n == 0, f"benchmark t_end=50, violations of M1-M4 (1% slack) = {n}")
    assert n == 0


def test_c07_speed_brackets(bench_traj):
    rep = speed_bounds_check(bench_traj, margin=0.05)
    h, g = rep["h_speed_upper"].measured, rep["g_speed_upper"].measured
    record(7, rep.passed, f"h-speed={h:.4f} [{rep['h_speed_lower'].target:.4f}, "
                          f"{rep['h_speed_upper'].target:.4f}], g-speed={g:.4f} "
                          f"[{rep['g_speed_lower'].target:.4f}, {rep['g_speed_upper'].target:.4f}]")
    assert rep.passed


# 8 -------------------------------------------------------------------------

def test_c08_spreading_thresholds():
    cfg = SolverConfig(n_u=129, n_v=129, t_end=60, dt_max=0.02, record_every=0.2,
                       growth_window=10)
    thr = thresholds(BENCH)
    # (ii) h0 above prey_spread_radius
    p_up = BENCH.replace(h0=1.1 * thr.prey_spread_radius, g0=1.0)
    out_up = classify_outcome(run(p_up, InitialData.cosine(p_up), cfg))

    # (i) h0 below prey_vanish_radius, mu = 0.2 * mu_* with mu_* the critical
    # capacity of the logistic problem with theta = lam - b/m
    h0 = 0.9 * thr.prey_vanish_radius
    floor = BENCH.lam - BENCH.b / BENCH.m
    cap_lo = find_critical_capacity(floor, 1.0, h0, 1.0, (0.01, 20.0), 10, cfg)
    mu = 0.2 * 0.5 * (cap_lo.lower + cap_lo.upper)
    p_dn = BENCH.replace(mu=mu, h0=h0, g0=h0)
    tr = run(p_dn, InitialData.cosine(p_dn), cfg)
    out_dn = classify_outcome(tr)
    umax = tr.umax_series[-1]

    ok = out_up.prey == SPREADING and out_dn.prey == VANISHING and umax < 1e-3
    record(8, ok, f"h0={p_up.h0:.3f}: prey {out_up.prey}; h0={h0:.3f}, mu_*~{mu / 0.2:.4f}, "
                  f"mu={mu:.4f}: prey {out_dn.prey}, max u(t_end)={umax:.2e}")
    assert ok


# 9 -------------------------------------------------------------------------

def test_c09_longtime_limits():
    cfg = SolverConfig(n_u=257, n_v=257, t_end=50)
    p = ModelParams(1.5, 1.0, 1.0, 1.0, 1.0, 5.0, 5.0, 2.5, 2.0)
    eq = closed_form_equilibrium(p, strict=True)
    tr = run(p, InitialData.cosine(p), cfg)
    out = classify_outcome(tr)
    du, dv = abs(tr.u0_series[-1] - eq.u_star), abs(tr.v0_series[-1] - eq.v_star)

    q = ModelParams(2.0, 1.0, 1.0, 1.0, 1.0, 5.0, 0.01, 3.0, 0.5)
    tq = run(q, InitialData.cosine(q), cfg)
    out_q = classify_outcome(tq)
    dq = abs(tq.u0_series[-1] - q.lam)

    ok = (out.outcome == BOTH_SPREAD and du < 0.02 and dv < 0.02
          and out_q.outcome == PREY_ONLY and dq < 0.02)
    record(9, ok, f"coexistence: {out.outcome}, |u-u*|={du:.2e}, |v-v*|={dv:.2e}; "
                  f"prey-only: {out_q.outcome}, |u-lam|={dq:.2e}")
    assert ok


# 10 ------------------------------------------------------------------------

def test_c10_separation():
    s = 1.0
    L_s = separation_gap(2.0, s)
    g0 = 1.0
    p = ModelParams(2.0, 1.0, 1.0, 1.0, 1.0, 5.0, 0.1, g0 + 1.1 * L_s, g0)
    tr = run(p, InitialData.cosine(p), SolverConfig(t_end=50))
    rep = check_separation(p, s, tr)
    ok = rep.passed and rep["h_ahead_of_ray"].passed is True
    record(10, ok, f"L_s={L_s:.4f}, min(h - s t - g0 - L_s)={rep['h_ahead_of_ray'].measured:.4f}, "
                   f"min(h - g)={rep['h_above_g'].measured:.4f}")
    assert ok


# 11 ------------------------------------------------------------------------

def test_c11_predator_slows_prey(bench_traj):
    cfg = bench_traj.cfg
    free = BENCH.replace(b=0.0)
    tr0 = run(free, InitialData.cosine(free), cfg)
    v1 = estimate_speed(bench_traj.times, bench_traj.h_series).value
    v0 = estimate_speed(tr0.times, tr0.h_series).value
    gap = v0 - v1
    ok = gap > cfg.solver_tol and v1 < v0
    record(11, ok, f"prey speed b=1: {v1:.5f}, b=0: {v0:.5f}, gap={gap:.3e} "
                   f"(solver tol {cfg.solver_tol:.0e})")
    assert ok


# 12 ------------------------------------------------------------------------

CFG_TEXT = """\
lambda = 2
b = 1
m = 1
d = 1
c = 1
mu = 5
rho = 5
h0 = 2.5
g0 = 2
t_end = 20
seed = 11
"""


def test_c12_determinism_and_convergence(tmp_path):
    cfg_path = tmp_path / "bench.cfg"
    cfg_path.write_text(CFG_TEXT)
    for k in (1, 2):
        assert cli.main(["simulate", "--config", str(cfg_path), "--out", str(tmp_path / f"r{k}")]) == 0
    files = sorted(p.relative_to(tmp_path / "r1") for p in (tmp_path / "r1").rglob("*.csv"))
    identical = all((tmp_path / "r1" / f).read_bytes() == (tmp_path / "r2" / f).read_bytes()
                    for f in files)

    base = SolverConfig(n_u=257, n_v=257, t_end=50)
    fine = base.replace(n_u=513, n_v=513)
    h1 = run(BENCH, InitialData.cosine(BENCH), base).h_series[-1]
    h2 = run(BENCH, InitialData.cosine(BENCH), fine).h_series[-1]
    rel = abs(h2 - h1) / h2
    ok = identical and rel < 0.01
    record(12, ok, f"{len(files)} CSVs byte-identical: {identical}; h(50) n=257: {h1:.5f}, "
                   f"n=513: {h2:.5f}, rel change {rel:.3%}")
    assert ok
