import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from twsolve.errors import DegenerateDenominator, InvalidParams, PoleAt
from twsolve.rational import RationalExpWave, asymptotics, evaluate, singularities

coef = st.floats(0.2, 3.0)


def tanh_wave():
    # tanh(xi) = (-1 + w)/(1 + w), w = exp(2 xi)
    return RationalExpWave(2.0, [-1.0, 1.0], [1.0, 1.0])


def test_tanh_values_and_derivatives():
    w = tanh_wave()
    xi = np.linspace(-30, 30, 121)
    np.testing.assert_allclose(w(xi), np.tanh(xi), atol=1e-15)
    np.testing.assert_allclose(w.evaluate(xi, 1), 1 / np.cosh(xi) ** 2, atol=1e-15)
    np.testing.assert_allclose(w.evaluate(xi, 2), -2 * np.tanh(xi) / np.cosh(xi) ** 2, atol=1e-14)


def test_no_overflow_far_out():
    w = RationalExpWave(3.0, [0.0, 4.0], [1.0, 2.0, 1.0])  # sech^2(1.5 xi)
    assert w(400.0) == 0.0 and w(-400.0) == 0.0
    assert np.isfinite(w.evaluate(400.0, 2))


@settings(max_examples=100, deadline=None)
@given(st.floats(0.3, 2.0), st.lists(coef, min_size=2, max_size=3), st.lists(coef, min_size=2, max_size=3),
       st.sampled_from([1, 2]), st.floats(-4, 4))
def test_derivatives_match_finite_differences(rate, num, den, power, xi):
    w = RationalExpWave(rate, num, den, power)
    h = 1e-4
    d1 = (w(xi + h) - w(xi - h)) / (2 * h)
    d2 = (w.evaluate(xi + h, 1) - w.evaluate(xi - h, 1)) / (2 * h)
    scale = 1 + abs(w.evaluate(xi, 1)) + abs(w.evaluate(xi, 2))
    assert w.evaluate(xi, 1) == pytest.approx(d1, abs=1e-6 * scale)
    assert w.evaluate(xi, 2) == pytest.approx(d2, abs=1e-6 * scale)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.3, 2.0), st.lists(coef, min_size=2, max_size=3), st.lists(coef, min_size=2, max_size=3),
       st.floats(-3, 3), st.floats(-3, 3))
def test_translation(rate, num, den, c, xi):
    w = RationalExpWave(rate, num, den)
    assert w.shifted(c)(xi) == pytest.approx(w(xi + c), rel=1e-10, abs=1e-12)


def test_poles():
    # 1/(1 - w) has a pole at xi = 0
    w = RationalExpWave(1.0, [1.0], [1.0, -1.0])
    assert singularities(w) == pytest.approx([0.0], abs=1e-14)
    with pytest.raises(PoleAt):
        w(0.0)
    assert w.pole_mask(np.array([0.0, 1.0])).tolist() == [True, False]
    assert asymptotics(w)[2] == "singular"


def test_pole_location_shifts():
    w = RationalExpWave(0.5, [1.0], [-4.0, 1.0])  # pole at w = 4
    assert singularities(w) == pytest.approx([math.log(4) / 0.5])
    assert singularities(w, (0.0, 1.0)) == []


def test_asymptotic_labels():
    assert asymptotics(tanh_wave()) == (-1.0, 1.0, "kink")
    assert asymptotics(RationalExpWave(1.0, [0.0, 4.0], [1.0, 2.0, 1.0]))[2] == "soliton"
    assert asymptotics(RationalExpWave(1.0, [2.0, 2.0], [1.0, 1.0]))[2] == "constant"
    low, high, _ = asymptotics(RationalExpWave(-2.0, [-1.0, 1.0], [1.0, 1.0]))
    assert (low, high) == (1.0, -1.0)


def test_validation():
    with pytest.raises(DegenerateDenominator):
        RationalExpWave(1.0, [1.0], [0.0, 0.0])
    with pytest.raises(InvalidParams):
        RationalExpWave(0.0, [1.0], [1.0])
    with pytest.raises(InvalidParams):
        RationalExpWave(1.0, [1.0], [1.0], power=3)
    with pytest.raises(InvalidParams):
        evaluate(tanh_wave(), 0.0, order=3)


def test_sign_normalisation():
    a = RationalExpWave(1.0, [1.0, 2.0], [-1.0, -3.0])
    assert a.den[0] > 0
    assert a(0.3) == pytest.approx((1 + 2 * math.exp(0.3)) / (-1 - 3 * math.exp(0.3)))
