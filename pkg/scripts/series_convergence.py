"""Sup-norm errors of the series branches against the numerical homoclinic wave.

Prints, for the located bifurcation point mu*:
  * the T > 0 branch (recurrence, b1 calibrated to U(0) = x*) on [0, 6];
  * the same branch with b1 fitted to the far tail of the numerical wave
    (this shows the x*-calibration, not the series, limits the accuracy);
  * the T < 0 branch from Cauchy data (Vandermonde solve) on [-6, 0];
  * the T < 0 branch from the recurrence on [-6, -3].
"""

import math

from scipy.optimize import brentq

from twsolve.errors import CalibrationFailed
from twsolve.expseries import (ExpBranch, branch_error, calibrate_b1, indicial_roots, lower_branch_coeffs,
                               upper_branch_coeffs)
from twsolve.homoclinic import find_homoclinic, homoclinic_branches


def main():
    res = find_homoclinic()
    mu, x = res.mu_star, res.x_star
    rates = indicial_roots(1.0, mu)
    br = homoclinic_branches(1.0, mu, tol=1e-12)
    print(f"mu* = {mu:.12f}  x* = {x:.12f}  alpha = {rates.alpha:.10f}  beta = {rates.beta:.10f}")

    T_tail = 18.0
    U_tail = br.lower(T_tail)[0]
    b1_tail = brentq(lambda b: ExpBranch(rates.beta, lower_branch_coeffs(1.0, mu, b, 60), -1)(T_tail) - U_tail,
                     0.5, 3.0, xtol=1e-14)

    print("\nT > 0 branch, sup error on [0, 6]")
    print(f"{'N':>4} {'b1 (x* calib.)':>15} {'error':>10} {'b1 (tail)':>12} {'error':>10} {'sum b_k - x*':>13}")
    for N in (10, 20, 40, 60, 80):
        try:
            b1 = calibrate_b1(1.0, mu, x, N)
            e_cal = branch_error(ExpBranch(rates.beta, lower_branch_coeffs(1.0, mu, b1, N), -1), br.lower, (0, 6))
        except CalibrationFailed:  # truncated maximum below x*: the tangency has no root
            b1 = e_cal = math.nan
        c_tail = lower_branch_coeffs(1.0, mu, b1_tail, N)
        e_tail = branch_error(ExpBranch(rates.beta, c_tail, -1), br.lower, (0, 6))
        print(f"{N:>4} {b1:>15.6f} {e_cal:>10.2e} {b1_tail:>12.6f} {e_tail:>10.2e} {math.fsum(c_tail) - x:>13.2e}")

    print("\nT < 0 branch")
    print(f"{'N':>4} {'Cauchy [-6,0]':>14} {'Cauchy [-6,-3]':>15} {'recurrence [-6,-3]':>19}")
    for N in (5, 10, 20, 25):
        cau = ExpBranch(rates.alpha, upper_branch_coeffs(1.0, mu, x, N), 1)
        try:
            rec = ExpBranch(rates.alpha, upper_branch_coeffs(1.0, mu, x, N, method="recurrence"), 1)
            e_rec = branch_error(rec, br.upper, (-6, -3))
        except CalibrationFailed:
            e_rec = math.nan
        print(f"{N:>4} {branch_error(cau, br.upper, (-6, 0)):>14.2e} {branch_error(cau, br.upper, (-6, -3)):>15.2e} "
              f"{e_rec:>19.2e}")


if __name__ == "__main__":
    main()
