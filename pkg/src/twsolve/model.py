"""Travelling-wave reduction of the generalized Burgers/telegraph family.

The PDE family is

    tau*u_tt + A*u*u_x + B*u_t - kappa*u_xx = f(u) = sum_nu lambda_nu u**nu

and with u = U(xi), xi = x + v*t, its travelling waves solve

    (tau*v**2 - kappa) U'' + (B*v + A*U) U' = f(U).

For the cubic-source generalized Burgers equation (GBE) the reduced ODE is
rescaled to the planar system

    dU/dT = -W,    dW/dT = U*(U**2 - 1) - A*W*(mu + U)

whose equilibria are B0 = (0, 0), B1 = (-1, 0), B2 = (1, 0).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import InvalidParams, NonHyperbolicFrame, NoRealRoots

SOURCE_EXPONENTS = (0.0, 0.5, 1.0, 1.5, 2.0, 3.0)

#: relative threshold below which an eigenvalue real part counts as zero
ZERO_REAL_PART = 1e-10


@dataclass(frozen=True)
class GBEParams:
    """Coefficients of the transport equation family.

    ``source_coeffs`` maps exponent nu to lambda_nu.  ``gamma`` and ``z0``
    are only meaningful for the GBE specialization built by :meth:`gbe`.
    """

    tau: float = 0.0
    advect: float = 0.0
    damp: float = 0.0
    kappa: float = 0.0
    source_coeffs: dict = field(default_factory=dict)
    gamma: float | None = None
    z0: float | None = None

    def __post_init__(self):
        if self.tau < 0 or self.kappa < 0:
            raise InvalidParams("tau and kappa must be non-negative")
        bad = [nu for nu in self.source_coeffs if float(nu) not in SOURCE_EXPONENTS]
        if bad:
            raise InvalidParams(f"unsupported source exponents {bad}")

    @classmethod
    def gbe(cls, tau, kappa, gamma, z0):
        """GBE specialization: A = B = 1, f(u) = -gamma*u*(u**2 - z0**2)."""
        return cls(tau=tau, advect=1.0, damp=1.0, kappa=kappa,
                   source_coeffs={1.0: gamma * z0 ** 2, 3.0: -gamma},
                   gamma=gamma, z0=z0)

    def source(self, u):
        return sum(lam * u ** nu for nu, lam in self.source_coeffs.items())


@dataclass(frozen=True)
class ReducedTW:
    h: float
    v: float
    A_scaled: float
    mu_scaled: float


class PhaseState(NamedTuple):
    U: float
    W: float


def reduce_to_tw(params: GBEParams, speed: float) -> ReducedTW:
    """Scale the GBE travelling-wave ODE to the one-parameter planar form.

    With U = z0*Ubar and T = sqrt(gamma*z0**2/h)*xi the damping coefficient
    becomes ``A = 1/sqrt(h*gamma)`` and the speed ``mu = v/z0``.
    """
    if params.gamma is None or params.z0 is None:
        raise InvalidParams("reduce_to_tw needs a GBE parameter set (gamma, z0)")
    if params.gamma <= 0 or params.z0 <= 0:
        raise InvalidParams("gamma and z0 must be positive")
    h = params.tau * speed ** 2 - params.kappa
    if h <= 0:
        raise NonHyperbolicFrame(f"h = tau*v^2 - kappa = {h} <= 0")
    return ReducedTW(h=h, v=speed, A_scaled=1.0 / math.sqrt(h * params.gamma),
                     mu_scaled=speed / params.z0)


def vector_field(state, A, mu):
    U, W = state
    return PhaseState(-W, U * (U * U - 1.0) - A * W * (mu + U))


def gbe_field(A, mu):
    """Return ``f(T, y)`` for the scaled planar system, for the integrator."""
    def f(T, y):
        U, W = y
        return (-W, U * (U * U - 1.0) - A * W * (mu + U))
    return f


def unscaled_field(h, mu, gamma, z0):
    """First-order form of h U'' + U'(mu + U) + gamma U (U^2 - z0^2) = 0 in xi.

    Uses the same convention W = -dU/dxi as the scaled system.
    """
    def f(xi, y):
        U, W = y
        return (-W, (gamma * U * (U * U - z0 * z0) - W * (mu + U)) / h)
    return f


def jacobian(state, A, mu):
    U, W = state
    return np.array([[0.0, -1.0],
                     [3.0 * U * U - 1.0 - A * W, -A * (mu + U)]])


def eigenvalues_2x2(J):
    """Eigenvalues of a real 2x2 matrix from its trace and determinant."""
    tr = J[0, 0] + J[1, 1]
    det = J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0]
    disc = 0.25 * tr * tr - det
    if disc >= 0:
        # avoid cancellation in the smaller root
        big = 0.5 * tr + math.copysign(math.sqrt(disc), tr if tr != 0 else 1.0)
        small = det / big if big != 0 else 0.0
        return tuple(sorted((complex(big), complex(small)), key=lambda z: -z.real))
    s = cmath.sqrt(disc)
    return (0.5 * tr + s, 0.5 * tr - s)


def classify(eigs, hamiltonian=False) -> str:
    l1, l2 = eigs
    det = (l1 * l2).real
    scale = 1.0 + max(abs(l1), abs(l2))
    if abs(det) <= ZERO_REAL_PART * scale:
        return "degenerate"
    if det < 0:
        return "saddle"
    re = l1.real
    if abs(re) <= ZERO_REAL_PART * scale:
        return "center" if hamiltonian else "degenerate"
    stability = "stable" if re < 0 else "unstable"
    focus = abs(l1.imag) > ZERO_REAL_PART * scale
    return f"{stability} {'focus' if focus else 'node'}"


@dataclass(frozen=True)
class Equilibrium:
    location: PhaseState
    eigenvalues: tuple
    kind: str


def equilibria(A, mu):
    """B0, B1, B2 of the scaled system with linear classification.

    B0 always has determinant -1 and is a saddle.
    """
    if A <= 0:
        raise InvalidParams("A must be positive")
    out = []
    for U in (0.0, -1.0, 1.0):
        p = PhaseState(U, 0.0)
        eigs = eigenvalues_2x2(jacobian(p, A, mu))
        out.append(Equilibrium(p, eigs, classify(eigs)))
    return out


def hopf_parameter(A):
    """Speed at which the trace -A(mu + 1) of the B2 linearization vanishes."""
    if A <= 0:
        raise InvalidParams("A must be positive")
    return -1.0


def saddle_rates(A, mu):
    """(unstable rate, -stable rate) at B0: positive roots of x^2 +- A mu x - 1."""
    s = math.hypot(A * mu, 2.0)
    # each root computed without subtractive cancellation; product is exactly 1
    if A * mu <= 0:
        alpha = 0.5 * (-A * mu + s)
        return alpha, 1.0 / alpha
    beta = 0.5 * (A * mu + s)
    return 1.0 / beta, beta


# Hamiltonian (A = B = 0) case --------------------------------------------

@dataclass(frozen=True)
class HamiltonianCase:
    """delta*u'' = lambda0 + lambda1 u + lambda2 u^2 + lambda3 u^3."""

    delta: float
    lambdas: tuple
    H: float | None = None

    def __post_init__(self):
        if self.delta == 0:
            raise InvalidParams("delta must be nonzero")
        if len(self.lambdas) != 4:
            raise InvalidParams("expected four cubic coefficients")

    def source(self, u):
        l0, l1, l2, l3 = self.lambdas
        return l0 + u * (l1 + u * (l2 + u * l3))

    def source_prime(self, u):
        _, l1, l2, l3 = self.lambdas
        return l1 + u * (2.0 * l2 + 3.0 * l3 * u)

    def potential(self, u):
        l0, l1, l2, l3 = self.lambdas
        return u * (l0 + u * (l1 / 2.0 + u * (l2 / 3.0 + u * l3 / 4.0)))

    def field(self):
        d = self.delta
        src = self.source

        def f(T, y):
            U, W = y
            return (-W, -src(U) / d)
        return f


def hamiltonian_energy(state, case: HamiltonianCase) -> float:
    U, W = state
    return 0.5 * W * W - case.potential(U) / case.delta


def _polish(coeffs, x, tol=1e-12, maxit=50):
    p = np.poly1d(coeffs)
    dp = p.deriv()
    for _ in range(maxit):
        r = p(x)
        if abs(r) <= tol:
            break
        d = dp(x)
        if d == 0:
            break
        x = x - r / d
    return float(x)


def hamiltonian_equilibria(case: HamiltonianCase):
    """Real roots of the cubic source, labelled center or saddle."""
    l0, l1, l2, l3 = case.lambdas
    if l3 == 0:
        raise InvalidParams("lambda3 must be nonzero")
    coeffs = [l3, l2, l1, l0]
    roots = np.roots(coeffs)
    scale = max(1.0, np.max(np.abs(roots)))
    real = sorted(_polish(coeffs, r.real) for r in roots
                  if abs(r.imag) <= 1e-7 * scale)
    if not real:
        raise NoRealRoots("cubic source has no real roots")
    out = []
    for u in real:
        curvature = case.source_prime(u) / case.delta
        kind = "saddle" if curvature > 0 else "center" if curvature < 0 else "degenerate"
        out.append((u, kind))
    return out
