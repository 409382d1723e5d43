"""Command-line entry point: ``ratiofront <subcommand> ...``.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 inconclusive classification.  Errors are reported as one tab-separated
line on stderr: ``error<TAB>kind<TAB>message``.
"""

from __future__ import annotations

import argparse
import csv
import itertools
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import records
from .config import MODEL_KEYS, RunConfig, load_config
from .criteria import thresholds
from .diagnostics import (BOTH_SPREAD, Report, SpeedConstants, classify_outcome,
                          estimate_speed, ray_region_check, speed_bounds_check)
from .equilibrium import closed_form_equilibrium, kinetic_residual, newton_equilibrium
from .errors import ConfigError, InsufficientData, NegativeDiscriminant, NoBracket
from .errors import NonFiniteState, NoConvergence, SingularJacobian, StepRejected
from .semiwave import SemiWaveQuery, solve_semiwave
from .solver import UNDECIDED, run

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_INCONCLUSIVE = 0, 2, 3, 4

_NUMERICAL = (NoBracket, NonFiniteState, StepRejected, NoConvergence, SingularJacobian,
              NegativeDiscriminant, FloatingPointError)

SUMMARY_COLUMNS = MODEL_KEYS + ("outcome", "h_speed", "g_speed", "u_final_0", "v_final_0")


class _Fail(Exception):
    def __init__(self, code, kind, msg):
        super().__init__(msg)
        self.code, self.kind = code, kind


# --------------------------------------------------------------------------
# simulate


def simulate(cfg: RunConfig, out_dir: Path, base_dir: Path | None = None) -> int:
    init = cfg.initial_data(base_dir)
    traj = run(cfg.params, init, cfg.solver)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "run.cfg").write_text(cfg.to_text(), encoding="utf-8")
    records.write_timeseries(traj, out_dir / "timeseries.csv")
    for k, snap in enumerate(traj.snapshots):
        records.write_snapshot(snap, out_dir / "snapshots" / f"snapshot_{k:04d}.csv")

    outcome = classify_outcome(traj)
    rep = diagnostics_report(traj, outcome)
    (out_dir / "report.txt").write_text(rep.to_text() + "\n", encoding="utf-8")
    (out_dir / "report.csv").write_text(rep.to_csv(), encoding="utf-8")
    print(f"outcome = {outcome.outcome} (prey {outcome.prey}, predator {outcome.predator})")
    print(f"h(t_end) = {records.fmt(traj.h_series[-1])}  g(t_end) = {records.fmt(traj.g_series[-1])}")
    print(f"bound violations = {len(traj.violations)}")
    return EXIT_INCONCLUSIVE if outcome.outcome == UNDECIDED else EXIT_OK


def diagnostics_report(traj, outcome) -> Report:
    p = traj.params
    rep = Report(f"diagnostics: {outcome.outcome}")
    rep.add("bound_violations", 0, len(traj.violations), -len(traj.violations),
            not traj.violations)
    if math.isfinite(outcome.predicted_u):
        rep.add("u_at_0_vs_limit", outcome.predicted_u, traj.u0_series[-1],
                abs(traj.u0_series[-1] - outcome.predicted_u), None, note="predicted limit")
        rep.add("v_at_0_vs_limit", outcome.predicted_v, traj.v0_series[-1],
                abs(traj.v0_series[-1] - outcome.predicted_v), None, note="predicted limit")
    if outcome.outcome == BOTH_SPREAD and p.m * p.lam > p.b:
        try:
            rep.clauses += speed_bounds_check(traj).clauses
        except InsufficientData:
            pass
        consts = SpeedConstants.from_params(p, traj.bounds.M2)
        rr = ray_region_check(traj, consts, eps=0.1)
        for cl in rr.clauses:
            cl.note = (cl.note + "; " if cl.note else "") + "finite-time surrogate"
        rep.clauses += rr.clauses
    return rep


# --------------------------------------------------------------------------
# sweep


def _parse_vary(spec: str):
    if "=" not in spec:
        raise _Fail(EXIT_CONFIG, "ParseError", f"--vary expects key=values, got {spec!r}")
    key, vals = spec.split("=", 1)
    key = key.strip()
    if key not in MODEL_KEYS:
        raise _Fail(EXIT_CONFIG, "ParseError", f"--vary: unknown model key {key!r}")
    try:
        if ":" in vals:
            parts = vals.split(":")
            lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
            log = len(parts) > 3 and parts[3] == "log"
            grid = np.geomspace(lo, hi, n) if log else np.linspace(lo, hi, n)
        else:
            grid = [float(v) for v in vals.split(",")]
    except (ValueError, IndexError):
        raise _Fail(EXIT_CONFIG, "ParseError", f"--vary: bad values {vals!r}") from None
    return key, [float(v) for v in grid]


def _sweep_one(args):
    cfg_text, overrides, base_dir = args
    from .config import parse_config
    # re-stating a key is a duplicate error: drop the originals first
    lines = [ln for ln in cfg_text.splitlines()
             if ln.split("#", 1)[0].split("=", 1)[0].strip() not in overrides]
    text = "\n".join(lines) + "".join(f"\n{k} = {format(v, '.17g')}" for k, v in overrides.items())
    cfg = parse_config(text)
    p = cfg.params
    row = dict(zip(MODEL_KEYS, (p.lam, p.b, p.m, p.d, p.c, p.mu, p.rho, p.h0, p.g0)))
    try:
        traj = run(p, cfg.initial_data(base_dir), cfg.solver)
    except _NUMERICAL as exc:
        row.update(outcome=f"error:{type(exc).__name__}", h_speed=math.nan, g_speed=math.nan,
                   u_final_0=math.nan, v_final_0=math.nan)
        return row
    row["outcome"] = classify_outcome(traj).outcome
    for name, series in (("h_speed", traj.h_series), ("g_speed", traj.g_series)):
        try:
            row[name] = estimate_speed(traj.times, series).value
        except InsufficientData:
            row[name] = math.nan
    row["u_final_0"] = float(traj.u0_series[-1])
    row["v_final_0"] = float(traj.v0_series[-1])
    return row


def sweep(cfg_text: str, varies, out_path: Path, workers: int, base_dir=None) -> int:
    keys = [k for k, _ in varies]
    combos = [dict(zip(keys, vals)) for vals in itertools.product(*(v for _, v in varies))]
    jobs = [(cfg_text, combo, base_dir) for combo in combos]
    out_path.parent.mkdir(parents=True, exist_ok=True)
    undecided = False
    with open(out_path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_COLUMNS)
        if workers <= 1:
            results = map(_sweep_one, jobs)
            for row in results:
                undecided |= _emit(w, fh, row)
        else:
            with ProcessPoolExecutor(max_workers=workers) as ex:
                # map yields in submission order: rows are written serially and deterministically
                for row in ex.map(_sweep_one, jobs):
                    undecided |= _emit(w, fh, row)
    print(f"{len(combos)} runs written to {out_path}")
    return EXIT_INCONCLUSIVE if undecided else EXIT_OK


def _emit(writer, fh, row) -> bool:
    writer.writerow([row[k] if isinstance(row[k], str) else records.fmt(row[k])
                     for k in SUMMARY_COLUMNS])
    fh.flush()
    return row["outcome"] == UNDECIDED


# --------------------------------------------------------------------------
# argument handling


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ratiofront",
                                 description="Two-front ratio-dependent prey-predator lab.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    sp = sub.add_parser("simulate", help="run the coupled free-boundary solver")
    sp.add_argument("--config", required=True, type=Path)
    sp.add_argument("--out", type=Path, help="output directory (overrides output_dir)")

    sp = sub.add_parser("semiwave", help="semi-wave speed and profile")
    sp.add_argument("--beta", required=True, type=float)
    sp.add_argument("--d", required=True, type=float)
    sp.add_argument("--theta", required=True, type=float)
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--profile", type=Path, help="write the (y, q) profile to this CSV")

    sp = sub.add_parser("equilibrium", help="coexistence equilibrium of the kinetics")
    sp.add_argument("--lambda", dest="lam", required=True, type=float)
    sp.add_argument("--b", required=True, type=float)
    sp.add_argument("--m", required=True, type=float)
    sp.add_argument("--c", required=True, type=float)

    sp = sub.add_parser("criteria", help="spreading/vanishing thresholds")
    sp.add_argument("--params", required=True, type=Path)
    sp.add_argument("--s", type=float)
    sp.add_argument("--csv", type=Path, help="also write the report as CSV")

    sp = sub.add_parser("sweep", help="Cartesian parameter sweep")
    sp.add_argument("--config", required=True, type=Path)
    sp.add_argument("--vary", action="append", required=True,
                    help="key=v1,v2,... or key=start:stop:num[:log]; repeatable")
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--out", type=Path, help="summary CSV path")
    return ap


def cmd_semiwave(a) -> int:
    try:
        sol = solve_semiwave(SemiWaveQuery(a.beta, a.d, a.theta), a.tol)
    except ValueError as exc:
        raise _Fail(EXIT_CONFIG, "ValidationError", str(exc)) from None
    print(f"c = {records.fmt(sol.c)}")
    print(f"c/sqrt(theta d) = {records.fmt(sol.c / math.sqrt(a.theta * a.d))}")
    print(f"residual = {sol.residual:.3e}")
    if a.profile:
        records.write_profile(sol.y, sol.q, a.profile)
    return EXIT_OK


def cmd_equilibrium(a) -> int:
    from .model import ModelParams
    try:
        p = ModelParams(a.lam, a.b, a.m, 1.0, a.c, 0.0, 0.0, 1.0, 1.0)
    except ValueError as exc:
        raise _Fail(EXIT_CONFIG, "ValidationError", str(exc)) from None
    eq = closed_form_equilibrium(p)
    print(f"regime_ok = {str(eq.regime_ok).lower()}")
    if not eq.regime_ok:
        print(f"boundary states: prey-only = ({records.fmt(p.lam)}, 0), predator-only = (0, 1)")
        return EXIT_OK
    r1, r2 = kinetic_residual(eq.u_star, eq.v_star, p.lam, p.b, p.m, p.c)
    un, vn = newton_equilibrium(p)
    print(f"A = {records.fmt(eq.A)}")
    print(f"Delta1 = {records.fmt(eq.Delta1)}")
    print(f"u* = {records.fmt(eq.u_star)}")
    print(f"v* = {records.fmt(eq.v_star)}")
    print(f"residuals = {r1:.3e} {r2:.3e}")
    print(f"newton = {records.fmt(un)} {records.fmt(vn)}")
    return EXIT_OK


def cmd_criteria(a) -> int:
    cfg = load_config(a.params)
    s = a.s if a.s is not None else cfg.s
    rep = thresholds(cfg.params, s)
    items = rep.items()
    width = max(len(k) for k, _ in items)
    for k, v in items:
        val = str(v).lower() if isinstance(v, bool) else records.fmt(v)
        print(f"{k:<{width}} = {val}")
    if a.csv:
        a.csv.parent.mkdir(parents=True, exist_ok=True)
        with open(a.csv, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["key", "value"])
            for k, v in items:
                w.writerow([k, str(v).lower() if isinstance(v, bool) else records.fmt(v)])
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.cmd == "simulate":
            cfg = load_config(args.config)
            out = args.out or Path(cfg.output_dir)
            return simulate(cfg, out, args.config.parent)
        if args.cmd == "semiwave":
            return cmd_semiwave(args)
        if args.cmd == "equilibrium":
            return cmd_equilibrium(args)
        if args.cmd == "criteria":
            return cmd_criteria(args)
        if args.cmd == "sweep":
            text = args.config.read_text(encoding="utf-8")
            cfg = load_config(args.config)          # validate the base file up front
            varies = [_parse_vary(v) for v in args.vary]
            out = args.out or Path(cfg.output_dir) / "sweep_summary.csv"
            return sweep(text, varies, out, args.workers, args.config.parent)
    except _Fail as exc:
        return _report(exc.code, exc.kind, str(exc))
    except ConfigError as exc:
        return _report(EXIT_CONFIG, type(exc).__name__, str(exc))
    except OSError as exc:
        return _report(EXIT_CONFIG, type(exc).__name__, str(exc))
    except _NUMERICAL as exc:
        return _report(EXIT_NUMERICAL, type(exc).__name__, str(exc))
    return EXIT_OK


def _report(code, kind, msg) -> int:
    msg = " ".join(str(msg).split())
    print(f"error\t{kind}\t{msg}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
