import json
import math
import warnings

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from twsolve.errors import CalibrationFailed, IllConditioned, InvalidParams, ResonantIndex
from twsolve.expseries import (ExpBranch, _recurrence, branch_error, build_approximant, calibrate_b1,
                               fit_rational_exp, indicial_roots, lemma1_check, lower_branch_coeffs,
                               rational_exp_form, taylor_derivatives, upper_branch_coeffs,
                               vandermonde_determinant, vandermonde_matrix, vandermonde_solve)

MU = -0.8357793175919622
X = 1.4262127903732058


def test_indicial_roots():
    r = indicial_roots(1.0, -0.836)
    assert r.alpha == pytest.approx(1.5018470, abs=1e-6)
    assert r.beta == pytest.approx(0.6658470, abs=1e-6)
    with pytest.raises(InvalidParams):
        indicial_roots(0.0, -0.8)


@given(st.floats(-5, 5), st.floats(-5, 5))
def test_rational_ansatz_incompatibility(A, mu):
    assert lemma1_check(A, mu) == (A * mu != 0)


def test_lower_branch_second_coefficient():
    """b2/b1^2 follows from the k = 2 balance of the recurrence."""
    A, mu = 1.0, -0.836
    beta = indicial_roots(A, mu).beta
    b = lower_branch_coeffs(A, mu, 1.0, 2)
    L2 = 4 * beta ** 2 - 2 * A * mu * beta - 1
    assert b[1] == pytest.approx(A * beta / L2, rel=1e-14)
    assert b[1] == pytest.approx(0.352915, abs=1e-6)


def test_lower_branch_series_solves_ode():
    """The truncated series leaves an O(exp(-(N+1) beta T)) residual in the ODE."""
    A, mu, N = 1.0, MU, 30
    beta = indicial_roots(A, mu).beta
    br = ExpBranch(beta, lower_branch_coeffs(A, mu, 0.3, N), -1)
    T = np.linspace(3, 8, 50)
    U, U1, U2 = br(T), br.derivative(T), br.derivative(T, 2)
    res = U2 + A * U1 * (mu + U) + U * (U * U - 1)
    assert np.max(np.abs(res)) < 1e-12


def test_resonance_detection():
    # choose the rate so that L(2) = (2r)^2 + s A mu 2r - 1 vanishes with A mu = 0: r = 1/2
    with pytest.raises(ResonantIndex) as exc:
        _recurrence(0.5, 1.0, 1.0, 1.0, 0.0, 1.0, 4)
    assert exc.value.k == 2


@pytest.mark.parametrize("N,b1", [(10, 1.4437), (20, 1.5332), (40, 1.5990)])
def test_calibrated_b1(N, b1):
    c = calibrate_b1(1.0, MU, X, N)
    assert c == pytest.approx(b1, abs=1e-4)
    assert math.fsum(lower_branch_coeffs(1.0, MU, c, N)) == pytest.approx(X, abs=1e-11)


def test_calibration_failure():
    with pytest.raises(CalibrationFailed):
        calibrate_b1(1.0, MU, 100.0, 10)


def test_taylor_derivatives():
    d = taylor_derivatives(1.0, -0.836, 1.426095, 0.0, 4)
    x = 1.426095
    assert d[0] == x and d[1] == 0.0
    assert d[2] == pytest.approx(x - x ** 3, rel=1e-14)
    assert d[2] == pytest.approx(-1.474221355, abs=1e-9)


def test_taylor_derivatives_match_ode_solution():
    from scipy.integrate import solve_ivp
    A, mu = 1.0, -0.836
    c = taylor_derivatives(A, mu, 0.8, 0.1, 12)
    f = lambda T, y: (y[1], -A * y[1] * (mu + y[0]) - y[0] * (y[0] ** 2 - 1))
    T = 0.2
    ref = solve_ivp(f, (0, T), (0.8, 0.1), rtol=1e-13, atol=1e-13, method="DOP853").y[0, -1]
    approx = sum(ck * T ** k / math.factorial(k) for k, ck in enumerate(c))
    assert approx == pytest.approx(ref, abs=1e-10)


@pytest.mark.parametrize("N", range(1, 9))
def test_vandermonde_determinant(N):
    """Closed form against a dense LU determinant (in 50-digit arithmetic:
    double-precision LU already loses ~1e-10 relative accuracy at N = 7)."""
    for alpha in (0.7, 1.5018, 2.3):
        with mpmath.workdps(50):
            dense = mpmath.det(mpmath.matrix(vandermonde_matrix(alpha, N).tolist()))
        assert vandermonde_determinant(alpha, N) == pytest.approx(float(dense), rel=1e-10)
        if N <= 5:
            assert vandermonde_determinant(alpha, N) == pytest.approx(np.linalg.det(vandermonde_matrix(alpha, N)),
                                                                      rel=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.3, 3.0), st.lists(st.floats(-10, 10), min_size=1, max_size=8))
def test_vandermonde_solve_matches_dense(alpha, rhs):
    M = vandermonde_matrix(alpha, len(rhs))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IllConditioned)
        a = vandermonde_solve(alpha, rhs)
    # backward-stable residual: relative to the row magnitudes |M| |a|
    scale = np.abs(M) @ np.abs(np.array(a)) + np.abs(rhs)
    assert np.all(np.abs(M @ np.array(a) - rhs) <= 1e-12 * scale + 1e-300)


def test_vandermonde_solve_high_precision():
    rhs = [mpmath.mpf(1) / (j + 1) for j in range(25)]
    with mpmath.workdps(60):
        a = vandermonde_solve(mpmath.mpf("1.5"), rhs, dps=60)
        x = [mpmath.mpf("1.5") * (k + 1) for k in range(25)]
        res = max(abs(mpmath.fsum(xk ** j * ak for xk, ak in zip(x, a)) - rhs[j])
                  / mpmath.fsum(abs(xk ** j * ak) for xk, ak in zip(x, a)) for j in range(25))
    assert res < mpmath.mpf(10) ** -50


def test_vandermonde_ill_conditioned_warning():
    with pytest.warns(IllConditioned):
        vandermonde_solve(1.5, [float(j % 3) for j in range(30)])


def test_upper_branch_matches_cauchy_data():
    a = upper_branch_coeffs(1.0, MU, X, 10)
    alpha = indicial_roots(1.0, MU).alpha
    br = ExpBranch(alpha, a, 1)
    assert br(0.0) == pytest.approx(X, abs=1e-12)
    assert br.derivative(0.0) == pytest.approx(0.0, abs=1e-11)
    assert br.derivative(0.0, 2) == pytest.approx(X - X ** 3, abs=1e-10)


def test_upper_branch_converges(reference_branches):
    errs = [branch_error(ExpBranch(indicial_roots(1.0, MU).alpha, upper_branch_coeffs(1.0, MU, X, N), 1),
                         reference_branches.upper, (-6.0, 0.0)) for N in (5, 10, 20)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 1e-4


def test_lower_branch_errors_decrease(reference_branches):
    beta = indicial_roots(1.0, MU).beta
    errs = []
    for N in (10, 20, 40):
        b = lower_branch_coeffs(1.0, MU, calibrate_b1(1.0, MU, X, N), N)
        errs.append(branch_error(ExpBranch(beta, b, -1), reference_branches.lower, (0.0, 6.0)))
    assert errs == pytest.approx([0.1151, 0.0595, 0.0204], abs=5e-4)


def test_invalid_method():
    with pytest.raises(InvalidParams):
        upper_branch_coeffs(1.0, MU, X, 10, method="bogus")


def test_approximant():
    ap = build_approximant(1.0, MU, X)
    assert ap(0.0) == X
    vals = ap(np.array([-10.0, 10.0]))
    assert abs(vals[0]) < 1e-5 and abs(vals[1]) < 1e-2
    assert abs(ap.derivative_jump) < 0.1
    d = json.loads(ap.to_json())
    assert len(d["a"]) == 20 and len(d["b"]) == 40


def test_rational_exp_form_basic():
    T = np.array([0.0])
    assert rational_exp_form(T, 1.0, [1.0], [1.0, 0.0])[0] == pytest.approx(0.5)


def test_fit_recovers_exact_rational_form():
    T = np.linspace(-5, 5, 101)
    U = rational_exp_form(T, 0.8, [2.0], [0.5, 1.0])
    fit = fit_rational_exp(T, U, 0.8, 1, starts=20)
    assert fit.sup_residual < 1e-8
