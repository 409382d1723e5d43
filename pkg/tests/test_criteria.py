import math

import numpy as np
import pytest

from ratiofront import (InitialData, ModelParams, SolverConfig, check_separation,
                        find_critical_capacity, run, thresholds)
from ratiofront.criteria import separation_gap
from ratiofront.errors import BadBracket


def test_threshold_radii():
    p = ModelParams(2, 1, 1, 1, 1, 5, 5, 2, 2)
    r = thresholds(p, s=1.0)
    assert r.prey_spread_radius == pytest.approx(math.pi / 2)
    assert r.prey_vanish_radius == pytest.approx(math.pi / 2 / math.sqrt(2))
    assert r.pred_spread_radius == pytest.approx(math.pi / 2)
    assert r.pred_vanish_radius == pytest.approx(math.pi / 2 / math.sqrt(2))
    assert r.L_s == pytest.approx(2 * math.pi / math.sqrt(3))
    assert r.s_bar_exists and not r.prey_extinction_regime
    assert r.prey_vanish_radius < r.prey_spread_radius


def test_threshold_flags():
    p = ModelParams(0.5, 1, 1, 1, 1, 1, 1, 1, 1)        # lam^2 + m lam = 0.75 < b
    r = thresholds(p)
    assert r.prey_extinction_regime and math.isnan(r.prey_spread_radius)
    assert math.isnan(r.L_s) and not r.s_bar_exists
    # prey semi-wave slower than predator's -> membership flag
    assert thresholds(ModelParams(1, 0.5, 1, 1, 1, 0.5, 5, 1, 1)).F_membership


def test_separation_gap_domain():
    assert math.isnan(separation_gap(2.0, 2.0))
    assert math.isnan(separation_gap(2.0, 0.0))


def test_bad_brackets():
    cfg = SolverConfig(n_u=65, t_end=5)
    with pytest.raises(BadBracket):
        find_critical_capacity(1, 1, 2.0, 1.0, (0.1, 1), 3, cfg)        # s0 above radius
    with pytest.raises(BadBracket):
        find_critical_capacity(1, 1, 1.0, 1.0, (1.0, 0.5), 3, cfg)


def test_separation_not_applicable():
    p = ModelParams(2, 1, 1, 1, 1, 5, 5, 2.5, 2.0)
    cfg = SolverConfig(n_u=65, n_v=65, t_end=1.0)
    tr = run(p, InitialData.cosine(p), cfg)
    rep = check_separation(p, 1.0, tr)
    assert rep["applicable"].passed is None
