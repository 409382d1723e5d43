"""Flat ``key = value`` run configuration.

Model parameters have no defaults and must all be given.  Solver knobs fall
back to ``SolverConfig`` defaults.  Unknown or repeated keys are errors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from .errors import ParseError, ValidationError
from .model import InitialData, ModelParams, cosine_profile
from .solver import SolverConfig

MODEL_KEYS = ("lambda", "b", "m", "d", "c", "mu", "rho", "h0", "g0")
PROFILE_KEYS = ("u0_profile", "u0_amplitude", "v0_profile", "v0_amplitude")
SOLVER_KEYS = tuple(f.name for f in fields(SolverConfig))
OTHER_KEYS = ("output_dir", "seed", "s")
ALL_KEYS = MODEL_KEYS + PROFILE_KEYS + SOLVER_KEYS + OTHER_KEYS

_INT_KEYS = {"n_u", "n_v", "seed"}
_STR_KEYS = {"u0_profile", "v0_profile", "output_dir"}


@dataclass(frozen=True)
class RunConfig:
    params: ModelParams
    solver: SolverConfig
    u0_profile: str = "cosine"
    u0_amplitude: float = 1.0
    v0_profile: str = "cosine"
    v0_amplitude: float = 1.0
    output_dir: str = "out"
    seed: int = 0
    s: float | None = None

    def initial_data(self, base_dir: Path | None = None) -> InitialData:
        p = self.params
        x_u, u0 = _profile(self.u0_profile, self.u0_amplitude, p.h0, base_dir, "u0")
        x_v, v0 = _profile(self.v0_profile, self.v0_amplitude, p.g0, base_dir, "v0")
        try:
            return InitialData(x_u, u0, x_v, v0)
        except ValueError as exc:
            raise ValidationError(str(exc)) from None

    def to_text(self) -> str:
        """Canonical text form; ``parse_config(to_text())`` gives back ``self``."""
        p = self.params
        vals = dict(zip(MODEL_KEYS, (p.lam, p.b, p.m, p.d, p.c, p.mu, p.rho, p.h0, p.g0)))
        vals.update(u0_profile=self.u0_profile, u0_amplitude=self.u0_amplitude,
                    v0_profile=self.v0_profile, v0_amplitude=self.v0_amplitude)
        vals.update({k: getattr(self.solver, k) for k in SOLVER_KEYS})
        vals.update(output_dir=self.output_dir, seed=self.seed)
        if self.s is not None:
            vals["s"] = self.s
        lines = []
        for k, v in vals.items():
            lines.append(f"{k} = {format(v, '.17g') if isinstance(v, float) else v}")
        return "\n".join(lines) + "\n"


def _profile(spec: str, amp: float, length: float, base_dir, name):
    if spec == "cosine":
        x = np.linspace(0.0, length, 257)
        return x, cosine_profile(x, length, amp)
    path = Path(spec)
    if base_dir is not None and not path.is_absolute():
        path = Path(base_dir) / path
    try:
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except OSError as exc:
        raise ValidationError(f"{name}: cannot read profile {path}: {exc}") from None
    x, w = data[:, 0], data[:, 1]
    if not math.isclose(x[-1], length, rel_tol=1e-9):
        raise ValidationError(f"{name}: profile must end at x = {length}")
    return x, w


def parse_config(text: str) -> RunConfig:
    """Parse ``key = value`` lines (``#`` starts a comment).

    Raises
    ------
    ParseError
        Malformed line, unknown key or duplicate key (with line numbers).
    ValidationError
        A value violates a model or solver invariant.
    """
    seen: dict[str, int] = {}
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ParseError(f"line {lineno}: expected 'key = value'")
        key, val = (part.strip() for part in body.split("=", 1))
        if key not in ALL_KEYS:
            raise ParseError(f"line {lineno}: unknown key '{key}'")
        if key in seen:
            raise ParseError(f"line {lineno}: duplicate key '{key}' (first on line {seen[key]})")
        if not val:
            raise ParseError(f"line {lineno}: empty value for '{key}'")
        seen[key] = lineno
        raw[key] = val

    values = {}
    for key, val in raw.items():
        if key in _STR_KEYS:
            values[key] = val
            continue
        try:
            values[key] = int(val) if key in _INT_KEYS else float(val)
        except ValueError:
            raise ParseError(f"line {seen[key]}: '{key}' is not a number: {val!r}") from None

    missing = [k for k in MODEL_KEYS if k not in values]
    if missing:
        raise ValidationError(f"missing model parameter(s): {', '.join(missing)}")
    try:
        params = ModelParams(*(values[k] for k in MODEL_KEYS))
        solver = SolverConfig(**{k: values[k] for k in SOLVER_KEYS if k in values})
    except ValueError as exc:
        raise ValidationError(str(exc)) from None

    extra = {k: values[k] for k in PROFILE_KEYS + OTHER_KEYS if k in values}
    return RunConfig(params=params, solver=solver, **extra)


def load_config(path) -> RunConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"))
