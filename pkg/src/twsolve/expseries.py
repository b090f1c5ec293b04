"""Two-sided exponential series for the solitary wave of the scaled GBE.

The homoclinic profile U(T) of

    U'' + A U' (mu + U) + U (U**2 - 1) = 0

is written as sum_k a_k exp(k alpha T) for T < 0 and sum_k b_k exp(-k beta T)
for T > 0, glued together at the section value U(0) = x_star.

* T > 0: coefficients follow from a convolution recurrence with b_1 free;
  b_1 is calibrated so the truncated sum equals x_star at T = 0.
* T < 0: the recurrence converges too slowly there, so the coefficients are
  instead fitted to the Cauchy data (x_star, 0): the first N derivatives of
  the truncated series at T = 0 must equal those of the true solution,
  which is a Vandermonde system in the nodes alpha*k.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field

import mpmath
import numpy as np
from scipy import optimize

from .errors import CalibrationFailed, IllConditioned, InvalidParams, ResonantIndex
from .model import saddle_rates

#: working precision (decimal digits) for Taylor data and the Vandermonde solve
DEFAULT_DPS = 60


# indicial equations ---------------------------------------------------------

@dataclass(frozen=True)
class IndicialPair:
    """Positive roots of a**2 + A mu a - 1 = 0 (alpha) and b**2 - A mu b - 1 = 0 (beta)."""

    alpha: float
    beta: float


def indicial_roots(A, mu) -> IndicialPair:
    if A <= 0:
        raise InvalidParams("A must be positive")
    return IndicialPair(*saddle_rates(A, mu))


def lemma1_check(A, mu) -> bool:
    """True when no finite rational-exponential ansatz can be homoclinic.

    Matching the lowest and highest exponentials of the ansatz forces alpha
    to solve both a**2 + A mu a - 1 = 0 and a**2 - A mu a - 1 = 0; they share
    a root exactly when A*mu = 0.
    """
    return A * mu != 0


# branch recurrences ---------------------------------------------------------

def _recurrence(rate, lin_sign, conv_sign, A, mu, c1, N):
    """Shared convolution recurrence for both branches.

    Coefficients of exp(s*k*rate*T) with s = +-1 satisfy
    L(k) c_k = conv_sign*A*rate*sum_{i+j=k} i c_i c_j - sum_{i+j+l=k} c_i c_j c_l
    with L(k) = (rate k)**2 + lin_sign*A*mu*rate*k - 1.
    """
    if N < 1:
        raise InvalidParams("N must be >= 1")
    c = [0.0] * (N + 1)
    c[1] = c1
    sq = [0.0] * (N + 1)  # sq[k] = sum_{i+j=k} c_i c_j
    for k in range(2, N + 1):
        L = (rate * k) ** 2 + lin_sign * A * mu * rate * k - 1.0
        if abs(L) <= 1e-14 * (rate * k) ** 2:
            raise ResonantIndex(k)
        quad = 0.0
        for i in range(1, k):
            quad += i * c[i] * c[k - i]
        sq[k - 1] = sum(c[i] * c[k - 1 - i] for i in range(1, k - 1))
        cub = 0.0
        for i in range(1, k - 1):
            cub += c[i] * sq[k - i]
        c[k] = (conv_sign * A * rate * quad - cub) / L
    return c[1:]


def lower_branch_coeffs(A, mu, b1, N):
    """b_1..b_N of the T > 0 branch sum_k b_k exp(-k beta T)."""
    beta = indicial_roots(A, mu).beta
    return _recurrence(beta, -1.0, 1.0, A, mu, float(b1), N)


def upper_recurrence_coeffs(A, mu, a1, N):
    """a_1..a_N of the T < 0 branch from the same recurrence (demonstration only)."""
    alpha = indicial_roots(A, mu).alpha
    return _recurrence(alpha, 1.0, -1.0, A, mu, float(a1), N)


def _first_root(resid, hi, what, grid=2000):
    """First sign change of ``resid`` on a uniform grid over (0, hi], refined by brentq."""
    xs = np.linspace(0.0, hi, grid + 1)
    prev_x, prev_r = 0.0, resid(0.0)
    for x in xs[1:]:
        r = resid(x)
        if not math.isfinite(r):
            break
        if (prev_r < 0) != (r < 0) or r == 0:
            return optimize.brentq(resid, prev_x, x, xtol=1e-12, rtol=4 * np.finfo(float).eps)
        prev_x, prev_r = x, r
    raise CalibrationFailed(what)


def _calibrate(coeff_fn, x_star, N):
    if x_star == 0:
        return 0.0
    sgn = math.copysign(1.0, x_star)

    def resid(c1):
        if c1 == 0:
            return -x_star
        with np.errstate(over="ignore", invalid="ignore"):
            s = math.fsum(coeff_fn(sgn * c1, N))
        return s - x_star if math.isfinite(s) else math.nan

    hi = 10.0 * abs(x_star)
    root = _first_root(resid, hi, f"no first coefficient in (0, {hi:g}] reproduces U(0)={x_star} at N={N}")
    return sgn * root


def calibrate_b1(A, mu, x_star, N):
    """First b_1 in (0, 10 x_star] whose truncated lower series sums to x_star.

    Since b_k = c_k b_1**k, the sums for different b_1 are (up to truncation)
    time-translates of one wave, whose maximum U(0) = x_star is reached at
    the exact b_1.  The condition is therefore tangential: a truncation error
    eps moves the root by O(sqrt(eps)), and for some N (e.g. 80 at the
    bifurcation) the truncated maximum falls just short of x_star and no
    root exists.
    """
    if N < 2:
        raise InvalidParams("N must be >= 2")
    return _calibrate(lambda b1, n: lower_branch_coeffs(A, mu, b1, n), x_star, N)


def calibrate_a1(A, mu, x_star, N):
    """Same calibration for the recurrence-built upper branch."""
    if N < 2:
        raise InvalidParams("N must be >= 2")
    return _calibrate(lambda a1, n: upper_recurrence_coeffs(A, mu, a1, n), x_star, N)


# Cauchy data and the Vandermonde system -----------------------------------

def taylor_coefficients(A, mu, x0, x1, order, dps=DEFAULT_DPS):
    """Taylor coefficients c_0..c_order of U at T = 0 (mpmath numbers).

    From U = sum c_m T^m:
    (m+2)(m+1) c_{m+2} = c_m - A (mu (m+1) c_{m+1} + sum_{i+j=m} (i+1) c_{i+1} c_j)
                         - sum_{i+j+l=m} c_i c_j c_l
    """
    with mpmath.workdps(dps):
        A_, mu_ = mpmath.mpf(A), mpmath.mpf(mu)
        c = [mpmath.mpf(x0), mpmath.mpf(x1)]
        sq = []  # sq[m] = sum_{i+j=m} c_i c_j
        for m in range(0, order - 1):
            sq.append(mpmath.fsum(c[i] * c[m - i] for i in range(m + 1)))
            cub = mpmath.fsum(c[i] * sq[m - i] for i in range(m + 1))
            quad = mpmath.fsum((i + 1) * c[i + 1] * c[m - i] for i in range(m + 1))
            nxt = (c[m] - A_ * (mu_ * (m + 1) * c[m + 1] + quad) - cub) / ((m + 2) * (m + 1))
            c.append(nxt)
        return c[:order + 1]


def taylor_derivatives(A, mu, x0, x1, order, dps=DEFAULT_DPS, as_float=True):
    """U(0), U'(0), ..., U^(order)(0) for Cauchy data U(0)=x0, U'(0)=x1."""
    if order < 2:
        raise InvalidParams("order must be >= 2")
    c = taylor_coefficients(A, mu, x0, x1, order, dps)
    with mpmath.workdps(dps):
        d = [ck * mpmath.factorial(k) for k, ck in enumerate(c)]
    return [float(v) for v in d] if as_float else d


def vandermonde_solve(alpha, rhs, dps=None):
    """Solve sum_k (alpha k)**j a_k = rhs_j, j = 0..N-1, k = 1..N.

    Bjorck-Pereyra elimination for the primal Vandermonde system (Golub &
    Van Loan, Algorithm 4.6.2), O(N**2).  With ``dps`` the arithmetic runs in
    mpmath at that precision and mpmath numbers are returned.

    Warns
    -----
    IllConditioned
        if the residual max|M a - rhs| exceeds 1e-6 max|rhs|.
    """
    if alpha == 0:
        raise InvalidParams("alpha must be nonzero")
    n = len(rhs)
    if n < 1:
        raise InvalidParams("need at least one equation")
    ctx = mpmath.workdps(dps) if dps else _NullCtx()
    with ctx:
        conv = mpmath.mpf if dps else float
        x = [conv(alpha) * (k + 1) for k in range(n)]
        f = [conv(v) for v in rhs]
        last = n - 1
        for k in range(last):
            for i in range(last, k, -1):
                f[i] = f[i] - x[k] * f[i - 1]
        for k in range(last - 1, -1, -1):
            for i in range(k + 1, n):
                f[i] = f[i] / (x[i] - x[i - k - 1])
            for i in range(k, last):
                f[i] = f[i] - f[i + 1]
        # residual in the same arithmetic
        res = 0
        scale = max(abs(v) for v in rhs) or 1
        for j in range(n):
            row = sum(xk ** j * ak for xk, ak in zip(x, f))
            res = max(res, abs(row - conv(rhs[j])))
        if res > 1e-6 * abs(scale):
            warnings.warn(f"Vandermonde residual {float(res):.3e} relative to |rhs| {float(scale):.3e}",
                          IllConditioned, stacklevel=2)
    return f


class _NullCtx:
    def __enter__(self):
        return self

    def __exit__(self, *exc):
        return False


def vandermonde_matrix(alpha, N):
    k = np.arange(1, N + 1, dtype=float)
    return (alpha * k)[None, :] ** np.arange(N, dtype=float)[:, None]


def vandermonde_determinant(alpha, N):
    """det M_N = alpha**(N(N-1)/2) * 0! 1! ... (N-1)!"""
    return alpha ** (N * (N - 1) // 2) * math.prod(math.factorial(j) for j in range(N))


def upper_branch_coeffs(A, mu, x_star, N, method="cauchy", dps=DEFAULT_DPS):
    """a_1..a_N of the T < 0 branch sum_k a_k exp(k alpha T).

    ``method="cauchy"`` matches U^(j)(0), j < N, of the solution with Cauchy
    data (x_star, 0).  ``method="recurrence"`` uses the convolution
    recurrence with a_1 calibrated to x_star; it is kept to show that this
    route does not converge to the wave on this side.
    """
    if N < 3:
        raise InvalidParams("N must be >= 3")
    if method == "recurrence":
        return upper_recurrence_coeffs(A, mu, calibrate_a1(A, mu, x_star, N), N)
    if method != "cauchy":
        raise InvalidParams(f"unknown method {method!r}")
    alpha = indicial_roots(A, mu).alpha
    with mpmath.workdps(dps):
        rhs = taylor_derivatives(A, mu, x_star, 0.0, N - 1, dps=dps, as_float=False)
        a = vandermonde_solve(mpmath.mpf(alpha), rhs, dps=dps)
        return [float(v) for v in a]


# evaluation -----------------------------------------------------------------

@dataclass(frozen=True)
class ExpBranch:
    """sum_k c_k exp(sign * k * rate * T)."""

    rate: float
    coeffs: tuple
    sign: int

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))

    def _powers(self, T):
        T = np.asarray(T, dtype=float)
        k = np.arange(1, len(self.coeffs) + 1)
        return np.exp(self.sign * self.rate * np.multiply.outer(T, k)), k

    def __call__(self, T):
        E, _ = self._powers(T)
        return E @ np.array(self.coeffs)

    def derivative(self, T, order=1):
        E, k = self._powers(T)
        return E @ (np.array(self.coeffs) * (self.sign * self.rate * k) ** order)


def branch_error(series, reference, interval, samples=1000):
    """Sup-norm difference between a branch and a reference trajectory's U."""
    T = np.linspace(interval[0], interval[1], samples)
    U_ref = reference(T)[:, 0]
    return float(np.max(np.abs(series(T) - U_ref)))


@dataclass
class ExpSeriesApproximant:
    alpha: float
    beta: float
    a_coeffs: list
    b_coeffs: list
    x_star: float
    meta: dict = field(default_factory=dict)

    @property
    def upper(self):
        return ExpBranch(self.alpha, self.a_coeffs, +1)

    @property
    def lower(self):
        return ExpBranch(self.beta, self.b_coeffs, -1)

    def __call__(self, T):
        T = np.asarray(T, dtype=float)
        out = np.where(T < 0, self.upper(np.minimum(T, 0.0)), self.lower(np.maximum(T, 0.0)))
        out = np.where(T == 0, self.x_star, out)
        return out if out.ndim else float(out)

    @property
    def derivative_jump(self):
        """U'(0-) - U'(0+); the upper branch enforces U'(0-) = 0."""
        return float(self.upper.derivative(0.0) - self.lower.derivative(0.0))

    def to_dict(self):
        return {"alpha": self.alpha, "beta": self.beta, "a": list(self.a_coeffs),
                "b": list(self.b_coeffs), "x_star": self.x_star,
                "derivative_jump": self.derivative_jump, **self.meta}

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)


def sew(upper: ExpBranch, lower: ExpBranch, x_star, meta=None) -> ExpSeriesApproximant:
    if upper.sign != 1 or lower.sign != -1:
        raise InvalidParams("upper branch must grow in T, lower branch decay")
    return ExpSeriesApproximant(upper.rate, lower.rate, list(upper.coeffs),
                                list(lower.coeffs), float(x_star), dict(meta or {}))


def build_approximant(A, mu, x_star, N_lower=40, N_upper=20) -> ExpSeriesApproximant:
    rates = indicial_roots(A, mu)
    b = lower_branch_coeffs(A, mu, calibrate_b1(A, mu, x_star, N_lower), N_lower)
    a = upper_branch_coeffs(A, mu, x_star, N_upper)
    return sew(ExpBranch(rates.alpha, a, 1), ExpBranch(rates.beta, b, -1), x_star,
               {"A": A, "mu": mu, "N_lower": N_lower, "N_upper": N_upper})


# finite rational-exponential fit ------------------------------------------

@dataclass(frozen=True)
class RationalFit:
    m: int
    alpha: float
    numerator: tuple
    denominator: tuple
    sup_residual: float


def rational_exp_form(T, alpha, num, den):
    """sum_{k=1}^m a_k e^{k alpha T} / (1 + sum_{r=1}^{m+1} b_r e^{r alpha T})."""
    T = np.asarray(T, dtype=float)
    E = np.exp(alpha * np.multiply.outer(T, np.arange(1, len(den) + 1)))
    return (E[..., :len(num)] @ np.asarray(num)) / (1.0 + E @ np.asarray(den))


def fit_rational_exp(T, U, alpha, m, starts=100, seed=0, max_nfev=2000):
    """Best multi-start least-squares fit of the m-term rational form.

    Returns the fit with the smallest sup-norm residual on the samples.
    Pole-crossing trial points are penalised rather than rejected.
    """
    T = np.asarray(T, dtype=float)
    U = np.asarray(U, dtype=float)
    rng = np.random.default_rng(seed)

    def resid(p):
        with np.errstate(all="ignore"):
            r = rational_exp_form(T, alpha, p[:m], p[m:]) - U
        return np.nan_to_num(r, nan=1e3, posinf=1e3, neginf=-1e3)

    best = None
    for _ in range(starts):
        p0 = rng.normal(size=2 * m + 1) * rng.choice([0.1, 1.0, 3.0, 10.0])
        sol = optimize.least_squares(resid, p0, max_nfev=max_nfev)
        with np.errstate(all="ignore"):
            sup = float(np.max(np.abs(rational_exp_form(T, alpha, sol.x[:m], sol.x[m:]) - U)))
        if math.isfinite(sup) and (best is None or sup < best.sup_residual):
            best = RationalFit(m, alpha, tuple(sol.x[:m]), tuple(sol.x[m:]), sup)
    return best
