"""Independent reference computations used only by the tests.

None of these share code with the package under test.
"""

import math

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq, fsolve


def manifold_slope_at_zero(c, d, theta, eps_rel=1e-7):
    """Slope ``q'(0)`` of the monotone orbit entering the saddle ``(theta, 0)``.

    Integrates ``dp/dq = (c p - q (theta - q)) / (d p)`` backwards in ``q``
    from a point on the stable eigenvector to ``q = 0``.
    """
    k = 0.5 * (math.sqrt(c * c / (d * d) + 4.0 * theta / d) - c / d)
    eps = eps_rel * theta
    q_start, p_start = theta - eps, k * eps

    def rhs(q, p):
        return [(c * p[0] - q * (theta - q)) / (d * p[0])]

    sol = solve_ivp(rhs, (q_start, 0.0), [p_start], method="DOP853",
                    rtol=1e-12, atol=1e-15 * max(theta, 1.0))
    return float(sol.y[0, -1])


def oracle_speed(beta, d, theta):
    """Root of ``beta * P(c) = c`` on ``(0, 2 sqrt(theta d))``."""
    cmax = 2.0 * math.sqrt(theta * d)
    f = lambda c: beta * manifold_slope_at_zero(c, d, theta) - c
    return brentq(f, 1e-12 * cmax, cmax * (1 - 1e-9), xtol=1e-15, rtol=1e-14)


def oracle_equilibrium(lam, b, m, c, guess=None):
    """Interior kinetic equilibrium by scipy's hybrid root finder."""
    def F(z):
        u, v = z
        r = u * v / (u + m * v)
        return [u * (lam - u) - b * r, v * (1 - v) + c * r]
    z = fsolve(F, guess or [lam / 2, 1.0], xtol=1e-12)
    return float(z[0]), float(z[1])


