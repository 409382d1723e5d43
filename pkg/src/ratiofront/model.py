"""Model definition for the ratio-dependent prey-predator system with two fronts.

The prey ``u`` lives on ``[0, h(t)]`` and the predator ``v`` on ``[0, g(t)]``::

    u_t - u_xx   = u (lam - u - b v / (u + m v))
    v_t - d v_xx = v (1 - v + c u / (u + m v))
    h' = -mu u_x(t, h),   g' = -rho v_x(t, g)

with Neumann conditions at ``x = 0`` and zero densities beyond each front.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Below this value of u + m v both interaction terms are taken as zero.
DELTA_RATIO = 1e-12


@dataclass(frozen=True)
class ModelParams:
    """The nine model constants.

    ``lam`` is the prey growth rate (``lambda`` is reserved in Python).
    ``b``, ``c``, ``mu`` and ``rho`` may be zero so that the decoupled and
    fixed-domain reductions of the model can be run with the same code.
    """

    lam: float
    b: float
    m: float
    d: float
    c: float
    mu: float
    rho: float
    h0: float
    g0: float

    def __post_init__(self):
        for name in ("lam", "m", "d", "h0", "g0"):
            val = getattr(self, name)
            if not (math.isfinite(val) and val > 0):
                raise ValueError(f"{_public_name(name)} must be positive")
        for name in ("b", "c", "mu", "rho"):
            val = getattr(self, name)
            if not (math.isfinite(val) and val >= 0):
                raise ValueError(f"{_public_name(name)} must be nonnegative")
        if self.h0 < self.g0:
            raise ValueError("h0 must be >= g0")

    def replace(self, **changes) -> "ModelParams":
        kw = {k: getattr(self, k) for k in self.__dataclass_fields__}
        kw.update(changes)
        return ModelParams(**kw)


def _public_name(name: str) -> str:
    return "lambda" if name == "lam" else name


@dataclass(frozen=True, eq=False)
class InitialData:
    """Initial profiles sampled on ``[0, h0]`` and ``[0, g0]``."""

    x_u: np.ndarray
    u0: np.ndarray
    x_v: np.ndarray
    v0: np.ndarray

    def __post_init__(self):
        _check_profile("u0", self.x_u, self.u0)
        _check_profile("v0", self.x_v, self.v0)

    @property
    def h0(self) -> float:
        return float(self.x_u[-1])

    @property
    def g0(self) -> float:
        return float(self.x_v[-1])

    @classmethod
    def cosine(cls, p: ModelParams, amp_u: float = 1.0, amp_v: float = 1.0,
               n: int = 257) -> "InitialData":
        x_u = np.linspace(0.0, p.h0, n)
        x_v = np.linspace(0.0, p.g0, n)
        return cls(x_u, cosine_profile(x_u, p.h0, amp_u),
                   x_v, cosine_profile(x_v, p.g0, amp_v))


def cosine_profile(x, length: float, amp: float) -> np.ndarray:
    """``amp * cos(pi x / (2 length))`` with the end value pinned to 0."""
    w = amp * np.cos(0.5 * np.pi * np.asarray(x, dtype=float) / length)
    w = np.where(np.asarray(x) >= length, 0.0, w)
    return np.maximum(w, 0.0)


def _check_profile(name: str, x: np.ndarray, w: np.ndarray, compat_tol: float = 0.05):
    x = np.asarray(x, dtype=float)
    w = np.asarray(w, dtype=float)
    if x.ndim != 1 or x.shape != w.shape or x.size < 3:
        raise ValueError(f"{name}: need matching 1-D samples (at least 3)")
    if x[0] != 0.0 or np.any(np.diff(x) <= 0):
        raise ValueError(f"{name}: grid must start at 0 and be increasing")
    if not np.all(np.isfinite(w)):
        raise ValueError(f"{name}: non-finite samples")
    if w[-1] != 0.0:
        raise ValueError(f"{name}: must vanish at the front")
    if np.any(w[:-1] <= 0.0):
        raise ValueError(f"{name}: must be positive before the front")
    # second-order one-sided slope at x=0 must be negligible (Neumann compatibility)
    dx = x[1] - x[0]
    slope0 = (-3 * w[0] + 4 * w[1] - w[2]) / (2 * dx)
    if abs(slope0) > compat_tol * w.max() / x[-1] + 1e-12:
        raise ValueError(f"{name}: derivative at x=0 must vanish (got {slope0:.3g})")


@dataclass(frozen=True, eq=False)
class SimState:
    """Solver state. ``u`` is sampled at ``x = y h`` for ``y`` uniform on [0, 1],
    ``v`` at ``x = z g`` likewise."""

    t: float
    h: float
    g: float
    u: np.ndarray
    v: np.ndarray

    @property
    def x_u(self) -> np.ndarray:
        return np.linspace(0.0, self.h, self.u.size)

    @property
    def x_v(self) -> np.ndarray:
        return np.linspace(0.0, self.g, self.v.size)


@dataclass(frozen=True)
class AprioriBounds:
    M1: float
    M2: float
    M3: float
    M4: float


def reaction_terms(u_val, v_val, p: ModelParams):
    """Prey and predator reaction rates.

    Works on scalars or arrays. Where ``u + m v <= DELTA_RATIO`` both
    interaction terms are zero.

    Returns
    -------
    (prey_rate, predator_rate)
    """
    u = np.asarray(u_val, dtype=float)
    v = np.asarray(v_val, dtype=float)
    s = u + p.m * v
    safe = s > DELTA_RATIO
    denom = np.where(safe, s, 1.0)
    uv = np.where(safe, u * v / denom, 0.0)
    fu = u * (p.lam - u) - p.b * uv
    fv = v * (1.0 - v) + p.c * uv
    if fu.ndim == 0:
        return float(fu), float(fv)
    return fu, fv


def sandwich_rates(u_val, v_val, p: ModelParams):
    """Logistic brackets for the reaction terms.

    The prey floor is ``(lam - b/m) u - u^2``.  It equals the clipped form
    ``max(0, lam - b/m) u - u^2`` whenever ``m lam >= b``; for ``m lam < b``
    the clipped form is not a lower bound (e.g. lam=1, b=2, m=1 at
    ``(u, v) = (1, 2)`` the prey rate is -4/3 < -1), so it is not used.

    Returns ``((prey_lo, prey_hi), (pred_lo, pred_hi))``.
    """
    u = np.asarray(u_val, dtype=float)
    v = np.asarray(v_val, dtype=float)
    prey_lo = (p.lam - p.b / p.m) * u - u * u
    prey_hi = p.lam * u - u * u
    pred_lo = v - v * v
    pred_hi = (1.0 + p.c) * v - v * v
    if u.ndim == 0 and v.ndim == 0:
        return (float(prey_lo), float(prey_hi)), (float(pred_lo), float(pred_hi))
    return (prey_lo, prey_hi), (pred_lo, pred_hi)


def min_slope(x: np.ndarray, w: np.ndarray) -> float:
    return float(np.min(np.diff(w) / np.diff(x)))


def apriori_bounds(p: ModelParams, init: InitialData) -> AprioriBounds:
    """Bounds on the densities and front speeds implied by the initial data."""
    M1 = max(p.lam, float(np.max(init.u0)))
    M2 = max(1.0 + p.c, float(np.max(init.v0)))
    M3 = 2.0 * p.mu * max(M1 * math.sqrt(p.lam / 2.0), -min_slope(init.x_u, init.u0))
    M4 = 2.0 * p.rho * max(M2 * math.sqrt((1.0 + p.c) / (2.0 * p.d)),
                           -min_slope(init.x_v, init.v0))
    return AprioriBounds(M1, M2, M3, M4)
