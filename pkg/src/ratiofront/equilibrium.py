"""Coexistence equilibrium of the kinetic system.

The positive root of::

    lam - u - b v / (u + m v) = 0
    1   - v + c u / (u + m v) = 0

exists in closed form when ``0 < m lam - b < b / c``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NegativeDiscriminant, NoConvergence, RegimeError, SingularJacobian


@dataclass(frozen=True)
class Equilibrium:
    u_star: float
    v_star: float
    A: float
    Delta1: float
    regime_ok: bool


def in_regime(lam: float, b: float, m: float, c: float) -> bool:
    gap = m * lam - b
    return gap > 0 and c * gap < b


def kinetic_residual(u: float, v: float, lam: float, b: float, m: float, c: float):
    s = u + m * v
    return lam - u - b * v / s, 1.0 - v + c * u / s


def closed_form_equilibrium(p, strict: bool = False) -> Equilibrium:
    """Closed-form ``(u*, v*)``.

    Outside the regime a record with ``regime_ok=False`` and NaN values is
    returned, unless ``strict`` is set, in which case ``RegimeError`` is raised.
    """
    lam, b, m, c = p.lam, p.b, p.m, p.c
    if not in_regime(lam, b, m, c):
        if strict:
            raise RegimeError("closed form needs 0 < m*lambda - b < b/c")
        return Equilibrium(math.nan, math.nan, math.nan, math.nan, False)
    A = lam * (2 * c * m * m + b) - m * b * (1 + 2 * c)
    k = b + c * m * m
    Delta1 = A * A + 4 * k * (b * (1 + c) - m * c * lam) * (m * lam - b)
    if Delta1 < 0:
        raise NegativeDiscriminant(f"Delta1 = {Delta1} inside the coexistence regime")
    u = (A + math.sqrt(Delta1)) / (2 * k)
    v = u * (lam - u) / (b - m * (lam - u))
    return Equilibrium(u, v, A, Delta1, True)


def newton_equilibrium(p, guess=None, tol: float = 1e-12, max_iter: int = 100):
    """Damped Newton solve of the kinetic system, seeded at ``(lam/2, 1)`` by default."""
    lam, b, m, c = p.lam, p.b, p.m, p.c
    x = np.array(guess if guess is not None else (lam / 2.0, 1.0), dtype=float)
    if np.any(x <= 0):
        raise ValueError("guess must have positive components")

    def F(z):
        return np.array(kinetic_residual(z[0], z[1], lam, b, m, c))

    def J(z):
        u, v = z
        s2 = (u + m * v) ** 2
        return np.array([
            [-1.0 + b * v / s2, -b * u / s2],
            [c * m * v / s2, -1.0 - c * m * u / s2],
        ])

    f = F(x)
    for _ in range(max_iter):
        if np.max(np.abs(f)) < tol:
            return float(x[0]), float(x[1])
        jac = J(x)
        if abs(np.linalg.det(jac)) < 1e-14:
            raise SingularJacobian(f"singular Jacobian at {x}")
        dx = np.linalg.solve(jac, -f)
        # halve until the iterate stays positive and the residual drops
        step = 1.0
        norm0 = np.max(np.abs(f))
        while step > 1e-6:
            trial = x + step * dx
            if np.all(trial > 0):
                ft = F(trial)
                if np.max(np.abs(ft)) < norm0 or step < 1e-3:
                    break
            step *= 0.5
        if not np.all(trial > 0):
            raise NoConvergence(f"Newton left the positive quadrant near {x}")
        x, f = trial, F(trial)
    if np.max(np.abs(f)) < tol:
        return float(x[0]), float(x[1])
    raise NoConvergence(f"Newton did not converge from {guess}; residual {np.max(np.abs(f)):.3g}")
