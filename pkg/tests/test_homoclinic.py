import json
import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from twsolve.errors import InvalidParams, NoSignChange
from twsolve.homoclinic import (RegimeLabel, classify_regime, default_seeds, distance_to, find_homoclinic,
                                manifold_seed, portrait, shoot, shoot_mismatch)
from twsolve.model import gbe_field, jacobian, saddle_rates

# frozen from the shooting oracle (tolerance 1e-10, offset 1e-6)
MU_STAR = -0.8357793175919622
X_STAR = 1.4262127903732058


@pytest.mark.parametrize("which", ["unstable", "stable"])
def test_manifold_seed_is_eigenvector(which):
    s = manifold_seed(1.0, -0.85, which, 1e-6)
    assert math.hypot(*s) == pytest.approx(1e-6)
    J = jacobian((0.0, 0.0), 1.0, -0.85)
    a, b = saddle_rates(1.0, -0.85)
    lam = a if which == "unstable" else -b
    np.testing.assert_allclose(J @ np.array(s), lam * np.array(s), atol=1e-15)
    assert s.U > 0


def test_shots_hit_section():
    up = shoot(1.0, -0.85, "unstable")
    down = shoot(1.0, -0.85, "stable")
    assert up.T_hit > 0 > down.T_hit
    assert up.U_hit > 0.5 and down.U_hit > 0.5
    assert abs(up.trajectory(up.T_hit)[1]) < 1e-10


def test_mismatch_insensitive_to_offset():
    m = [shoot_mismatch(1.0, -0.85, offset=o) for o in (1e-5, 1e-6, 1e-7)]
    assert max(m) - min(m) <= 1e-7
    assert m[0] == pytest.approx(0.0136789, abs=1e-6)


def test_unstable_shot_matches_scipy_oracle():
    mu = -0.85
    up = shoot(1.0, mu, "unstable")
    seed = manifold_seed(1.0, mu, "unstable", 1e-6)
    # W < 0 from the seed until U peaks on the section W = 0
    ev = lambda T, y: y[1]
    ev.terminal, ev.direction = True, 1
    ref = solve_ivp(gbe_field(1.0, mu), (0, 200), seed, method="DOP853", rtol=1e-12, atol=1e-12, events=ev)
    assert up.U_hit == pytest.approx(ref.y_events[0][0][0], abs=1e-8)


def test_find_homoclinic_values(homoclinic_result):
    r = homoclinic_result
    assert r.mu_star == pytest.approx(MU_STAR, abs=1e-6)
    assert r.x_star == pytest.approx(X_STAR, abs=1e-5)
    assert abs(r.mismatch) <= 1e-6
    assert abs(r.alpha * r.beta - 1) <= 1e-12
    d = json.loads(r.to_json())
    assert set(d) >= {"mu_star", "x_star", "alpha", "beta", "mismatch", "iterations"}


def test_find_homoclinic_bad_bracket():
    with pytest.raises(NoSignChange):
        find_homoclinic(1.0, bracket=(-0.5, -0.4))


def test_classify_regime():
    assert classify_regime(1.0, -0.9, MU_STAR) is RegimeLabel.CYCLE
    assert classify_regime(1.0, -0.836, MU_STAR) is RegimeLabel.HOMOCLINIC
    assert classify_regime(1.0, -0.8, MU_STAR) is RegimeLabel.CONNECTION
    assert RegimeLabel.CYCLE == "cycle_regime"


def test_separatrix_reaches_b2_in_connection_regime():
    seed = manifold_seed(1.0, -0.8, "unstable", 1e-6)
    tr = portrait(1.0, -0.8, [seed], t_budget=200.0, tol=1e-10)[0]
    assert distance_to((1.0, 0.0), tr.final) < 1e-3


def test_portrait_truncates_escaping_orbits():
    trajs = portrait(1.0, -0.9, t_budget=30.0)
    assert len(trajs) == 2 * len(default_seeds(1.0, -0.9))
    assert any(t.meta["truncated"] for t in trajs)
    for t in trajs:
        if t.meta["truncated"]:
            assert np.hypot(*t.final) >= 50.0 or len(t) > 1
        assert t.meta["direction"] in ("forward", "backward")


def test_portrait_threaded_matches_serial():
    a = portrait(1.0, -0.85, t_budget=10.0)
    b = portrait(1.0, -0.85, t_budget=10.0, workers=3)
    for x, y in zip(a, b):
        np.testing.assert_array_equal(x.y, y.y)


def test_portrait_rejects_bad_budget():
    with pytest.raises(InvalidParams):
        portrait(1.0, -0.85, t_budget=0.0)
