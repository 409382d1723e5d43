import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ratiofront import InitialData, ModelParams, apriori_bounds, reaction_terms, sandwich_rates
from ratiofront.model import cosine_profile

pos = st.floats(0.05, 10.0)
dens = st.floats(0.0, 20.0)


def test_params_validation_messages():
    with pytest.raises(ValueError, match="lambda must be positive"):
        ModelParams(-1, 1, 1, 1, 1, 1, 1, 1, 1)
    with pytest.raises(ValueError, match="d must be positive"):
        ModelParams(1, 1, 1, 0, 1, 1, 1, 1, 1)
    with pytest.raises(ValueError, match="h0 must be >= g0"):
        ModelParams(1, 1, 1, 1, 1, 1, 1, 1, 2)


def test_params_allow_zero_coupling_and_capacity():
    p = ModelParams(1, 0, 1, 1, 0, 0, 0, 1, 1)
    assert p.b == 0 and p.mu == 0
    assert p.replace(b=2.0).b == 2.0


def test_reaction_terms_hand_values():
    p = ModelParams(2, 1, 1, 1, 1, 1, 1, 1, 1)
    fu, fv = reaction_terms(1.0, 1.0, p)
    # u v / (u + m v) = 1/2
    assert fu == pytest.approx(1.0 * (2 - 1) - 0.5)
    assert fv == pytest.approx(0.0 + 0.5)


def test_reaction_terms_ratio_cutoff():
    p = ModelParams(2, 1, 1, 1, 1, 1, 1, 1, 1)
    fu, fv = reaction_terms(np.zeros(3), np.zeros(3), p)
    assert np.all(fu == 0) and np.all(fv == 0)
    fu, fv = reaction_terms(0.0, 0.5, p)
    assert fu == 0.0 and fv == pytest.approx(0.25)


@settings(max_examples=300, deadline=None)
@given(lam=pos, b=st.floats(0, 5), m=pos, c=st.floats(0, 5), u=dens, v=dens)
def test_sandwich_brackets_reaction(lam, b, m, c, u, v):
    p = ModelParams(lam, b, m, 1.0, c, 1.0, 1.0, 1.0, 1.0)
    fu, fv = reaction_terms(u, v, p)
    (plo, phi), (qlo, qhi) = sandwich_rates(u, v, p)
    scale = 1e-12 * (1 + u * u + v * v + lam * u + c * v)
    assert plo - scale <= fu <= phi + scale
    assert qlo - scale <= fv <= qhi + scale


def test_apriori_bounds_cosine_data():
    p = ModelParams(2, 1, 1, 1, 1, 5, 5, 2, 2)
    init = InitialData.cosine(p)
    B = apriori_bounds(p, init)
    assert B.M1 == 2.0                     # max(lam, ||u0||) with ||u0|| = 1
    assert B.M2 == 2.0                     # max(1 + c, ||v0||)
    # the cosine profile has min slope -pi/(2 h0) in magnitude < M1 sqrt(lam/2)
    assert B.M3 == pytest.approx(2 * 5 * 2 * math.sqrt(1.0))
    assert B.M4 == pytest.approx(2 * 5 * 2 * math.sqrt(2.0 / 2.0))


def test_initial_data_validation():
    x = np.linspace(0, 1, 11)
    ok = cosine_profile(x, 1.0, 1.0)
    InitialData(x, ok, x, ok)
    bad = ok.copy()
    bad[-1] = 0.1
    with pytest.raises(ValueError):
        InitialData(x, bad, x, ok)
    bad = ok.copy()
    bad[3] = 0.0
    with pytest.raises(ValueError):
        InitialData(x, bad, x, ok)
    with pytest.raises(ValueError):
        InitialData(x, 1 - x, x, ok)          # violates the Neumann condition at 0


def test_sandwich_hand_values():
    p = ModelParams(2, 1, 1, 1, 1, 1, 1, 1, 1)
    assert sandwich_rates(1.0, 1.0, p) == ((0.0, 1.0), (0.0, 1.0))
    (plo, phi), _ = sandwich_rates(0.0, 3.0, p)
    assert plo == 0.0 and phi == 0.0


def test_clipped_floor_fails_below_threshold():
    # the clipped floor max(0, lam - b/m) u - u^2 is not a bound when m lam < b
    p = ModelParams(1, 2, 1, 1, 0, 1, 1, 1, 1)
    fu, _ = reaction_terms(1.0, 2.0, p)
    assert fu < max(0.0, p.lam - p.b / p.m) * 1.0 - 1.0
    (plo, _), _ = sandwich_rates(1.0, 2.0, p)
    assert plo <= fu


def test_rates_grid_inside_brackets_and_continuous_at_origin():
    p = ModelParams(2, 1, 1, 1, 1, 5, 5, 2, 2)
    u, v = np.meshgrid(np.linspace(0, 2, 41), np.linspace(0, 2, 41))
    fu, fv = reaction_terms(u, v, p)
    (plo, phi), (qlo, qhi) = sandwich_rates(u, v, p)
    assert np.all(plo <= fu + 1e-14) and np.all(fu <= phi + 1e-14)
    assert np.all(qlo <= fv + 1e-14) and np.all(fv <= qhi + 1e-14)
    assert np.all(np.abs(fu) <= (p.lam + p.b) * u + (1 + p.c) * v + u * u)


def test_apriori_bounds_monotone_in_amplitude():
    p = ModelParams(2, 1, 1, 1, 1, 5, 5, 2, 2)
    M1 = [apriori_bounds(p, InitialData.cosine(p, amp_u=a)).M1 for a in (0.5, 1, 2, 3, 4)]
    assert np.all(np.diff(M1) >= 0)
