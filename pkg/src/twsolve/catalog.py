"""Exact travelling-wave families and their residual verification.

Every family solves the reduced travelling-wave ODE

    delta u'' + (B v + A u) u' = f(u),   delta = tau v**2 - kappa,

with u(xi) = (F(w)/G(w))**p, w = exp(alpha xi), except the two BIO families,
which solve the coupled reduction

    mu V' + A V V' - V'' = a1 U + a2 V + a3 U V,   mu U' = b1 U + b2 V + b3 U V.

Inside the constraint formulas ``h`` denotes alpha*delta.

Several constraint formulas in their literal form do not satisfy their ODE.
Each builder implements the corrected relation by default; where a
concrete literal alternative exists it is available with ``literal=True`` so
the failure can be demonstrated.  The per-case ``notes`` record what was
changed and why.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConstraintViolation, InvalidParams, PoleInSampleSet
from .rational import RationalExpWave, asymptotics, singularities

HALF_POWERS = (0.5, 1.5)
DEFAULT_SEED = 20240611
#: draws whose condition estimate exceeds this are redrawn: rounding alone
#: leaves a residual of about MAX_CONDITION * eps = 2e-11
MAX_CONDITION = 1e5


@dataclass(frozen=True)
class TWEquation:
    """Coefficients of delta u'' + (B v + A u) u' = sum_nu lambda_nu u**nu."""

    tau: float
    kappa: float
    v: float
    A: float
    B: float
    source: dict

    @property
    def delta(self):
        return self.tau * self.v ** 2 - self.kappa

    def f(self, u, root=None):
        """Source term; ``root`` is the branch of u**(1/2) to use."""
        out = np.zeros_like(np.asarray(u, dtype=float))
        for nu, lam in self.source.items():
            if lam == 0:
                continue
            if nu == 0.5:
                out = out + lam * root
            elif nu == 1.5:
                out = out + lam * root * u
            else:
                out = out + lam * u ** int(nu)
        return out

    def to_dict(self):
        return {"tau": self.tau, "kappa": self.kappa, "v": self.v, "A": self.A, "B": self.B,
                "delta": self.delta, "source": {str(k): v for k, v in self.source.items()}}


@dataclass(frozen=True)
class BioSystemParams:
    A: float
    mu: float
    a: tuple  # (a1, a2, a3)
    b: tuple  # (b1, b2, b3)

    def to_dict(self):
        return {"A": self.A, "mu": self.mu, "a": list(self.a), "b": list(self.b)}


@dataclass(frozen=True)
class CaseSolution:
    id: str
    waves: tuple
    equation: TWEquation | BioSystemParams
    literal: bool = False

    @property
    def wave(self):
        return self.waves[0]


@dataclass(frozen=True)
class CatalogCase:
    id: str
    summary: str
    label: str  # expected asymptotic class: kink | soliton | singular
    ranges: dict  # free parameter -> (lo, hi) for random draws
    builder: Callable
    notes: str = ""
    has_literal: bool = False
    example: dict = field(default_factory=dict)

    def build(self, params=None, literal=False):
        if literal and not self.has_literal:
            raise InvalidParams(f"case {self.id} has no separate literal form")
        p = dict(self.example)
        p.update(params or {})
        missing = [k for k in self.ranges if k not in p]
        if missing:
            raise InvalidParams(f"case {self.id} missing parameters {missing}")
        return self.builder(p, literal)

    def draw(self, rng):
        return {k: float(rng.uniform(lo, hi)) for k, (lo, hi) in self.ranges.items()}


def _require(cond, text):
    if not cond:
        raise ConstraintViolation(text)


def _sol(id_, waves, eq, literal):
    return CaseSolution(id_, tuple(waves), eq, literal)


def _delta(p):
    return p["tau"] * p["v"] ** 2 - p["kappa"]


# case I: first-degree rational in w, cubic source -----------------------

def _case_I(p, literal):
    a0, a1, b0, b1, al, B, l3 = (p[k] for k in ("a0", "a1", "b0", "b1", "alpha", "B", "lambda3"))
    v = p["v"]
    h = al * _delta(p)
    D, Th = a1 * b0 - a0 * b1, a1 * b0 + a0 * b1
    _require(D != 0, "a1*b0 - a0*b1 != 0")
    _require(b0 * b1 != 0, "b0*b1 != 0")
    l0 = -a0 * a1 * al / D ** 2 * (B * v * D + h * Th)
    l1 = (al * b0 * b1 * (B * v * Th * D + h * Th ** 2) + l3 * a0 * a1 * D ** 2) / (b0 * b1 * D ** 2)
    l2 = -(al * b0 ** 2 * b1 ** 2 * (B * v * D + h * Th) + l3 * D ** 2 * Th) / (b0 * b1 * D ** 2)
    A = -(-2 * h * al * b0 ** 2 * b1 ** 2 + l3 * D ** 2) / (al * b0 * b1 * D)
    eq = TWEquation(p["tau"], p["kappa"], v, A, B, {0: l0, 1: l1, 2: l2, 3: l3})
    return _sol("I", [RationalExpWave(al, [a0, a1], [b0, b1], 1, v)], eq, literal)


def _case_I_tanh(p, literal):
    l0, l2, l3, A, tau, kappa = (p[k] for k in ("lambda0", "lambda2", "lambda3", "A", "tau", "kappa"))
    B = 1.0
    _require(l0 * l2 < 0, "lambda0*lambda2 < 0")
    rad = A ** 2 * B ** 2 - 8 * kappa * l3 + 16 * kappa * l2 ** 2 * tau
    _require(rad >= 0, "A^2 B^2 - 8 kappa lambda3 + 16 kappa lambda2^2 tau >= 0")
    den = 2 * l3 - 4 * l2 ** 2 * tau
    _require(den != 0, "2 lambda3 - 4 lambda2^2 tau != 0")
    v = l2 * (A * B + math.sqrt(rad)) / den
    _require(v != 0, "v != 0")
    l1 = l0 * l3 / l2
    s = math.sqrt(-l0 / l2)
    q = math.sqrt(-l0 * l2) / v
    # s*tanh(q xi) = (-s + s w)/(1 + w) with w = exp(2 q xi)
    a0, a1 = (s, -s) if literal else (-s, s)
    eq = TWEquation(tau, kappa, v, A, B, {0: l0, 1: l1, 2: l2, 3: l3})
    return _sol("I_tanh", [RationalExpWave(2 * q, [a0, a1], [1.0, 1.0], 1, v)], eq, literal)


def _case_I_kink2(p, literal):
    l1, l2, l3, B, tau, kappa = (p[k] for k in ("lambda1", "lambda2", "lambda3", "B", "tau", "kappa"))
    sgn = 1.0 if p.get("root_sign", 1.0) >= 0 else -1.0
    _require(l1 != 0, "lambda1 != 0")
    disc = l2 ** 2 - 4 * l1 * l3
    _require(disc > 0, "lambda2^2 - 4 lambda1 lambda3 > 0")
    root = sgn * math.sqrt(disc)
    # (-l2 + root)/l1 cancels when root and l2 share a sign; the two values of
    # b0 solve l1 b^2 + 2 l2 b + 4 l3 = 0, so use the product of the roots there
    b0 = (-l2 + root) / l1 if root * l2 <= 0 else 4 * l3 / (-l2 - root)
    _require(b0 != 0, "b0 != 0")
    P = 2 * l2 + 3 * b0 * l1
    den = 4 * l2 ** 2 * tau + 4 * b0 * l2 * (B ** 2 + 3 * l1 * tau) + b0 ** 2 * l1 * (2 * B ** 2 + 9 * l1 * tau)
    _require(den > 0, "4l2^2 tau + 4 b0 l2 (B^2 + 3 l1 tau) + b0^2 l1 (2B^2 + 9 l1 tau) > 0")
    _require(P != 0 and kappa > 0 and B != 0, "2 lambda2 + 3 b0 lambda1 != 0, kappa > 0, B != 0")
    v = math.sqrt(kappa) * P / math.sqrt(den)
    al = -P / (4 * B * v * b0)
    eq = TWEquation(tau, kappa, v, 0.0, B, {0: 0.0, 1: l1, 2: l2, 3: l3})
    return _sol("I_kink2", [RationalExpWave(2 * al, [2.0], [b0, b0], 1, v)], eq, literal)


# case II: squared first-degree rational, half-integer source ---------------

def _case_II(p, literal):
    a0, b0, b1, al, B, v = (p[k] for k in ("a0", "b0", "b1", "alpha", "B", "v"))
    # tails (a0/b0)^2 and (a1/b1)^2 coincide: a1/b1 = -a0/b0
    a1 = p.get("a1", -a0 * b1 / b0)
    h = al * _delta(p)
    D, Th = a1 * b0 - a0 * b1, a1 * b0 + a0 * b1
    _require(D != 0, "a1*b0 - a0*b1 != 0")
    l0 = 2 * a0 ** 2 * a1 ** 2 * al * h / D ** 2
    lh = -2 * a0 * a1 * al * (3 * h * Th + B * v * D) / D ** 2
    l1 = 2 * al * (h * (3 * Th ** 2 - D ** 2) + B * v * D * Th) / D ** 2
    l32 = -2 * b0 * b1 * al * (5 * h * Th + B * v * D) / D ** 2
    l2 = 6 * b0 ** 2 * b1 ** 2 * h * al / D ** 2
    eq = TWEquation(p["tau"], p["kappa"], v, 0.0, B, {0: l0, 0.5: lh, 1: l1, 1.5: l32, 2: l2})
    return _sol("II", [RationalExpWave(al, [a0, a1], [b0, b1], 2, v)], eq, literal)


# case III: always singular --------------------------------------------------

def _case_III(p, literal):
    l1, l3, A, tau, kappa, a1 = (p[k] for k in ("lambda1", "lambda3", "A", "tau", "kappa", "a1"))
    _require(l1 > 0 and l3 > 0, "lambda1 > 0 and lambda3 > 0")
    _require(A != 0 and tau > 0 and a1 != 0, "A != 0, tau > 0, a1 != 0")
    a2 = -math.sqrt(l3 / l1) / (6 * a1)
    al = math.sqrt(l1 * l3) / A
    rad = (A ** 2 / l3 + kappa) / tau
    _require(rad > 0, "(A^2/lambda3 + kappa)/tau > 0")
    v = math.copysign(math.sqrt(rad), p.get("v_sign", 1.0))
    den = [-a1 ** 3, -3 * a1 ** 2 * a2, 3 * a1 * a2 ** 2, a2 ** 3]
    src = {1: l1 + l3} if literal else {1: l1, 3: l3}
    eq = TWEquation(tau, kappa, v, A, 0.0, src)
    return _sol("III", [RationalExpWave(al, [0.0, a1, a2], den, 1, v)], eq, literal)


# case IV: A = B = 0 ------------------------------------------------------------

def _case_IVa(p, literal):
    a0, a1, b0, b1, al, v = (p[k] for k in ("a0", "a1", "b0", "b1", "alpha", "v"))
    h = al * _delta(p)
    D = a1 * b0 - a0 * b1
    _require(D != 0, "a1*b0 - a0*b1 != 0")
    _require(a0 != 0 and b0 != 0, "a0 != 0 and b0 != 0")
    l0 = a0 * (2 * a0 ** 2 * b0 - a1 ** 2 * b0 - a0 * a1 * b1) * al * h / D ** 2
    l1 = (a1 ** 2 * b0 ** 2 + 4 * a0 * a1 * b0 * b1 + a0 ** 2 * (-6 * b0 ** 2 + b1 ** 2)) * al * h / D ** 2
    l2 = 3 * b0 * (2 * a0 * b0 ** 2 - a1 * b0 * b1 - a0 * b1 ** 2) * al * h / D ** 2
    l3 = -2 * b0 ** (1 if literal else 2) * (b0 ** 2 - b1 ** 2) * al * h / D ** 2
    eq = TWEquation(p["tau"], p["kappa"], v, 0.0, 0.0, {0: l0, 1: l1, 2: l2, 3: l3})
    wave = RationalExpWave(al, [a0, 2 * a1, a0], [b0, 2 * b1, b0], 1, v)
    return _sol("IVa", [wave], eq, literal)


def _case_IVa_particular(p, literal):
    l1, l2, l3, al, tau, kappa = (p[k] for k in ("lambda1", "lambda2", "lambda3", "alpha", "tau", "kappa"))
    _require(l3 != 0 and tau > 0, "lambda3 != 0 and tau > 0")
    gap = (l2 ** 2 - l1 * l3) if literal else (l2 ** 2 / 3 - l1 * l3)
    _require(gap > 0, "lambda2^2/3 - lambda1 lambda3 > 0")
    a0 = -l2 / (3 * l3)
    a1 = math.sqrt(2 * gap / l3 ** 2)
    l0 = -(l1 * a0 + l2 * a0 ** 2 + l3 * a0 ** 3)
    rad = (l1 - l2 ** 2 / (3 * l3) + kappa * al ** 2) / (tau * al ** 2)
    _require(rad > 0, "[lambda1 - lambda2^2/(3 lambda3) + kappa alpha^2]/(tau alpha^2) > 0")
    v = math.sqrt(rad)
    eq = TWEquation(tau, kappa, v, 0.0, 0.0, {0: l0, 1: l1, 2: l2, 3: l3})
    wave = RationalExpWave(al, [a0, 2 * a1, a0], [1.0, 0.0, 1.0], 1, v)
    return _sol("IVa_particular", [wave], eq, literal)


def _case_IVb(p, literal):
    b0, b1, al, v = (p[k] for k in ("b0", "b1", "alpha", "v"))
    _require(b1 != 0, "b1 != 0")
    h = al * _delta(p)
    src = {0.5: -3 * al * h / b1, 1: (12 * b0 + 4 * b1) * al * h / b1,
           1.5: -(15 * b0 ** 2 + 10 * b0 * b1) * al * h / b1,
           2: (6 * b0 ** 2 * b1 + 6 * b0 ** 3) * al * h / b1}
    eq = TWEquation(p["tau"], p["kappa"], v, 0.0, 0.0, src)
    wave = RationalExpWave(al, [1.0, 2.0, 1.0], [b0, 2 * b0 + 4 * b1, b0], 2, v)
    return _sol("IVb", [wave], eq, literal)


def _case_IVc(p, literal):
    a0, a1, al, v = (p[k] for k in ("a0", "a1", "alpha", "v"))
    _require(a1 != 0, "a1 != 0")
    h = al * _delta(p)
    lh = (9 * a0 ** 2 + 6 * a0 * a1) * al * h / a1
    src = {0: 2 * a0 ** 2 * (a0 + a1) * al * h / a1, 0.5: lh if literal else -lh,
           1: (12 * a0 + 4 * a1) * al * h / a1, 1.5: -5 * al * h / a1}
    eq = TWEquation(p["tau"], p["kappa"], v, 0.0, 0.0, src)
    wave = RationalExpWave(al, [a0, 2 * a0 + 4 * a1, a0], [1.0, 2.0, 1.0], 2, v)
    return _sol("IVc", [wave], eq, literal)


def _case_IVd(p, literal):
    a0, a1, al, v = (p[k] for k in ("a0", "a1", "alpha", "v"))
    h = al * _delta(p)
    src = {1: 4 * al * h, 1.5: -10 * a1 * al * h, 2: (6 * a1 ** 2 - 6 * a0 ** 2) * al * h}
    eq = TWEquation(p["tau"], p["kappa"], v, 0.0, 0.0, src)
    wave = RationalExpWave(al, [0.0, 2.0], [a0, 2 * a1, a0], 2, v)
    return _sol("IVd", [wave], eq, literal)


# d'Alembert families (A = B = 0, cubic source) -------------------------------

def _dalembert_frame(p):
    """(tau, kappa, v) from either an explicit frame or a bare delta."""
    if "delta" in p and p["delta"] is not None:
        d = p["delta"]
        _require(d != 0, "delta != 0")
        return (1.0, 0.0, math.sqrt(d)) if d > 0 else (0.0, -d, 1.0)
    return p["tau"], p["kappa"], p["v"]


def _case_IVe_a(p, literal):
    l1, l3 = p["lambda1"], p["lambda3"]
    tau, kappa, v = _dalembert_frame(p)
    d = tau * v ** 2 - kappa
    _require(l1 > 0 and l3 < 0, "lambda1 > 0 and lambda3 < 0")
    _require(d > 0, "delta = tau v^2 - kappa > 0")
    k = math.sqrt(l1 / d)
    c = math.sqrt(-2 * l1 / l3)
    eq = TWEquation(tau, kappa, v, 0.0, 0.0, {0: 0.0, 1: l1, 2: 0.0, 3: l3})
    return _sol("IVe_a", [RationalExpWave(k, [0.0, 2 * c], [1.0, 0.0, 1.0], 1, v)], eq, literal)


def _case_IVe_b(p, literal):
    l1, l3 = p["lambda1"], p["lambda3"]
    tau, kappa, v = _dalembert_frame(p)
    d = tau * v ** 2 - kappa
    _require(l1 < 0 and l3 > 0, "lambda1 < 0 and lambda3 > 0")
    _require(d > 0, "delta = tau v^2 - kappa > 0")
    k = math.sqrt(-l1) / (2 * d) if literal else math.sqrt(-l1 / (2 * d))
    c = math.sqrt(-l1 / l3)
    eq = TWEquation(tau, kappa, v, 0.0, 0.0, {0: 0.0, 1: l1, 2: 0.0, 3: l3})
    # tanh(k xi) = (w - 1)/(w + 1), w = exp(2 k xi)
    return _sol("IVe_b", [RationalExpWave(2 * k, [-c, c], [1.0, 1.0], 1, v)], eq, literal)


def _case_IVe_c(p, literal):
    l1, l2 = p["lambda1"], p["lambda2"]
    tau, kappa, v = _dalembert_frame(p)
    d = tau * v ** 2 - kappa
    _require(l1 > 0 and l2 != 0, "lambda1 > 0 and lambda2 != 0")
    _require(d > 0, "delta = tau v^2 - kappa > 0")
    k = math.sqrt(l1 / d) / 2
    c = -3 * l1 / (2 * l2)
    eq = TWEquation(tau, kappa, v, 0.0, 0.0, {0: 0.0, 1: l1, 2: l2, 3: 0.0})
    # sech^2(k xi) = 4w/(1 + w)^2, w = exp(2 k xi)
    return _sol("IVe_c", [RationalExpWave(2 * k, [0.0, 4 * c], [1.0, 2.0, 1.0], 1, v)], eq, literal)


# BIO: coupled reduction ----------------------------------------------------

def _bio_free(p):
    A, mu, p1, q1, q2 = (p[k] for k in ("A", "mu", "p1", "q1", "q2"))
    _require(q1 != 0 and q2 != 0 and A != 0 and p1 != 0, "q1, q2, A, p1 != 0")
    return A, mu, p1, q1, q2


def _case_BIO_kink(p, literal):
    A, mu, p1, q1, q2 = _bio_free(p)
    U = RationalExpWave(1.0, [p1], [q1, q2], 1, mu)
    V = RationalExpWave(1.0, [2 * q1], [A * q1, A * q2], 1, mu)
    if literal:
        a = (mu - 1, 0.0, q1 * (1 - mu) / p1)
        b = (-A * p1 * mu / (2 * q1), 0.0, A * mu / 2)
    else:
        a = (-2 * q1 * (mu + 1) / (A * p1), 0.0, q1 * (mu + 1) / p1)
        b = (-mu, 0.0, A * mu / 2)
    return _sol("BIO_kink", [U, V], BioSystemParams(A, mu, a, b), literal)


def _case_BIO_soliton(p, literal):
    A, mu, p1, q1, q2 = _bio_free(p)
    _require(mu != 1, "mu != 1")
    U = RationalExpWave(1.0, [0.0, 4 * p1 * q2], [q1 ** 2, 4 * q1 * q2, 4 * q2 ** 2], 1, mu)
    if literal:
        c0, c1 = q1 * (mu - 1), 2 * q2 * (mu - 1)
        a = (mu ** 2 - 1, -2 * q1 * mu / (A * p1), 2 * q1 / p1)
        b = (-A * p1 * (mu ** 2 - 1) * mu / (2 * q1), mu ** 2, -A * mu)
    else:
        c0, c1 = -q1 * (mu - 1), -2 * q2 * (mu + 1)
        a = (2 * mu * q1 / (A * p1), mu ** 2 - 1, 2 * q1 / p1)
        b = (-mu ** 2, -A * mu * p1 * (mu ** 2 - 1) / (2 * q1), -A * mu)
    # V = 8 q1 q2 w / (A (q1 + 2 q2 w)(c1 w + c0))
    den = [A * q1 * c0, A * (q1 * c1 + 2 * q2 * c0), A * 2 * q2 * c1]
    V = RationalExpWave(1.0, [0.0, 8 * q1 * q2], den, 1, mu)
    return _sol("BIO_soliton", [U, V], BioSystemParams(A, mu, a, b), literal)


_FRAME = {"tau": (0.5, 2.0), "kappa": (0.0, 1.0), "v": (0.5, 2.0)}

CASES = {c.id: c for c in [
    CatalogCase(
        "I", "first-degree rational kink, cubic source, arbitrary A and B", "kink",
        {"a0": (0.5, 2), "a1": (-2, -0.5), "b0": (0.5, 2), "b1": (0.5, 2), "alpha": (0.5, 2),
         "B": (0.5, 2), "lambda3": (-2, 2), **_FRAME},
        _case_I,
        "Kink condition read from the displayed formula: b0*b1 > 0 and a0/b0 != a1/b1 "
        "(the prose uses indices 2 that the formula does not have).",
        example={"a0": 1.0, "a1": -1.0, "b0": 1.0, "b1": 1.0, "alpha": 1.0, "B": 1.0,
                 "lambda3": 0.5, "tau": 1.0, "kappa": 0.5, "v": 1.0}),
    CatalogCase(
        "I_tanh", "tanh kink of case I with b0 = b1 = 1 and B = 1", "kink",
        {"lambda0": (0.5, 2), "lambda2": (-2, -0.5), "lambda3": (-2, 2), "A": (0.0, 2),
         "tau": (0.0, 1.0), "kappa": (0.0, 1.0)},
        _case_I_tanh,
        "The displayed profile s*tanh(q xi), s = sqrt(-lambda0/lambda2), needs a1 = -a0 = s; "
        "the stated a0 = -a1 = s gives -s*tanh, which fails the ODE (literal=True). "
        "The speed formula holds for B = 1, which is fixed here.",
        has_literal=True,
        example={"lambda0": 1.0, "lambda2": -1.0, "lambda3": -1.0, "A": 1.0, "tau": 0.5, "kappa": 0.5}),
    CatalogCase(
        "I_kink2", "kink 2/(b0 (1 + exp(2 alpha xi))) with A = lambda0 = 0", "kink",
        {"lambda1": (-2, 2), "lambda2": (-2, 2), "lambda3": (-2, 2), "B": (0.5, 2),
         "tau": (0.5, 2), "kappa": (0.5, 2)},
        _case_I_kink2,
        "Requires a positive radicand under the speed; draws violating it are rejected. "
        "b0 is evaluated as 4 lambda3/(-lambda2 -+ sqrt(disc)) when the direct quotient "
        "(-lambda2 +- sqrt(disc))/lambda1 would cancel.",
        example={"lambda1": 1.0, "lambda2": -3.0, "lambda3": 1.0, "B": 1.0, "tau": 1.0, "kappa": 1.0}),
    CatalogCase(
        "II", "squared first-degree rational, half-integer powers, A = 0", "soliton",
        {"a0": (0.5, 2), "b0": (0.5, 2), "b1": (0.5, 2), "alpha": (0.5, 2), "B": (0.5, 2), **_FRAME},
        _case_II,
        "Solitary condition read from the displayed formula as a1/b1 = -a0/b0 (prose indices 2). "
        "u^(1/2) is the signed base F/G; samples with F/G < 0 are excluded from verification.",
        example={"a0": 1.0, "b0": 1.0, "b1": 1.0, "alpha": 1.0, "B": 1.0, "tau": 1.0, "kappa": 0.5, "v": 1.0}),
    CatalogCase(
        "III", "cubic-over-quadratic wave with B = 0; always singular", "singular",
        {"lambda1": (0.5, 2), "lambda3": (0.5, 2), "A": (0.5, 2), "tau": (0.5, 2),
         "kappa": (0.0, 1.0), "a1": (0.5, 2)},
        _case_III,
        "Source must be lambda1 u + lambda3 u^3 (literal form lambda3 u; literal=True), and the cubic "
        "denominator coefficient is a2^3 (literal form a3, which is otherwise undefined). With "
        "t = a2 w/a1 the denominator is a1^3 (t - 1)(t^2 + 4t + 1); since a2/a1 < 0 the roots "
        "t = -2 +- sqrt(3) are always reached, so a real pole always exists.",
        has_literal=True,
        example={"lambda1": 1.0, "lambda3": 1.0, "A": 1.0, "tau": 1.0, "kappa": 0.5, "a1": 1.0}),
    CatalogCase(
        "IVa", "symmetric quadratic-over-quadratic soliton, A = B = 0", "soliton",
        {"a0": (0.5, 2), "a1": (-2, 2), "b0": (0.5, 2), "b1": (0.0, 2), "alpha": (0.5, 2), **_FRAME},
        _case_IVa,
        "lambda3 must carry b0^2: -2 b0^2 (b0^2 - b1^2) alpha h / Delta^2 "
        "(literal form b0; literal=True). The other coefficients are unchanged.",
        has_literal=True,
        example={"a0": 1.0, "a1": 0.2, "b0": 1.0, "b1": 0.5, "alpha": 1.0, "tau": 1.0, "kappa": 0.5, "v": 1.0}),
    CatalogCase(
        "IVa_particular", "case IVa with b1 = 0, b0 = 1 in terms of the source", "soliton",
        {"lambda1": (-1, 1), "lambda2": (-1, 1), "lambda3": (-2, -0.5), "alpha": (0.5, 2),
         "tau": (0.5, 2), "kappa": (0.0, 2)},
        _case_IVa_particular,
        "Amplitude must be a1 = sqrt(2 (lambda2^2/3 - lambda1 lambda3)/lambda3^2) "
        "(literal form lambda2^2 - lambda1 lambda3; literal=True).",
        has_literal=True,
        example={"lambda1": 0.5, "lambda2": 0.3, "lambda3": -1.0, "alpha": 1.0, "tau": 1.0, "kappa": 0.5}),
    CatalogCase(
        "IVb", "squared (w + 1)^2 over quadratic, half-integer powers", "soliton",
        {"b0": (0.5, 2), "b1": (0.5, 2), "alpha": (0.5, 2), **_FRAME},
        _case_IVb,
        example={"b0": 1.0, "b1": 1.0, "alpha": 1.0, "tau": 1.0, "kappa": 0.5, "v": 1.0}),
    CatalogCase(
        "IVc", "squared quadratic over (w + 1)^2, half-integer powers", "soliton",
        {"a0": (0.5, 2), "a1": (0.5, 2), "alpha": (0.5, 2), **_FRAME},
        _case_IVc,
        "The u^(1/2) coefficient must be -(9 a0^2 + 6 a0 a1) alpha h / a1 "
        "(literal form without the minus sign; literal=True).",
        has_literal=True,
        example={"a0": 1.0, "a1": 1.0, "alpha": 1.0, "tau": 1.0, "kappa": 0.5, "v": 1.0}),
    CatalogCase(
        "IVd", "squared 2w over quadratic, half-integer powers", "soliton",
        {"a0": (0.5, 2), "a1": (0.0, 2), "alpha": (0.5, 2), **_FRAME},
        _case_IVd,
        example={"a0": 1.0, "a1": 1.0, "alpha": 1.0, "tau": 1.0, "kappa": 0.5, "v": 1.0}),
    CatalogCase(
        "IVe_a", "sech soliton of delta u'' = lambda1 u + lambda3 u^3", "soliton",
        {"lambda1": (0.2, 2), "lambda3": (-2, -0.2), "tau": (1.0, 2), "kappa": (0.0, 0.9), "v": (1.0, 2)},
        _case_IVe_a,
        example={"lambda1": 1.0, "lambda3": -2.0, "tau": 1.0, "kappa": 0.0, "v": 1.0}),
    CatalogCase(
        "IVe_b", "tanh kink of delta u'' = lambda1 u + lambda3 u^3", "kink",
        {"lambda1": (-2, -0.2), "lambda3": (0.2, 2), "tau": (1.0, 2), "kappa": (0.0, 0.9), "v": (1.0, 2)},
        _case_IVe_b,
        "Rate must be sqrt(-lambda1/(2 delta)); the literal form sqrt(-lambda1)/(2 delta) agrees only "
        "at delta = 1/2 (literal=True).",
        has_literal=True,
        example={"lambda1": -1.0, "lambda3": 1.0, "tau": 1.0, "kappa": 0.0, "v": 1.0}),
    CatalogCase(
        "IVe_c", "sech^2 soliton of delta u'' = lambda1 u + lambda2 u^2", "soliton",
        {"lambda1": (0.2, 2), "lambda2": (-2, 2), "tau": (1.0, 2), "kappa": (0.0, 0.9), "v": (1.0, 2)},
        _case_IVe_c,
        example={"lambda1": 1.0, "lambda2": -1.5, "tau": 1.0, "kappa": 0.0, "v": 1.0}),
    CatalogCase(
        "BIO_kink", "kink of the coupled reaction-convection reduction", "kink",
        {"A": (0.5, 2), "mu": (-3, 3), "p1": (0.5, 2), "q1": (0.5, 2), "q2": (0.5, 2)},
        _case_BIO_kink,
        "The literal coefficient set leaves an O(1) residual for generic parameters "
        "(literal=True). Substituting the profiles gives "
        "a1 = -2 q1 (mu + 1)/(A p1), a3 = q1 (mu + 1)/p1, b1 = -mu, b3 = A mu/2, a2 = b2 = 0. "
        "Since V is proportional to U the split between the U and V coefficients is not unique.",
        has_literal=True,
        example={"A": 1.0, "mu": 2.0, "p1": 1.0, "q1": 1.0, "q2": 1.0}),
    CatalogCase(
        "BIO_soliton", "soliton of the coupled reaction-convection reduction", "soliton",
        {"A": (0.5, 2), "mu": (1.2, 3), "p1": (0.5, 2), "q1": (0.5, 2), "q2": (0.5, 2)},
        _case_BIO_soliton,
        "In the literal form V is a constant multiple of U, so mu U' = g(U, V) would need U' to be a "
        "quadratic in U, which a hump cannot satisfy on both flanks (literal=True fails). "
        "A consistent family keeps U and the coefficients a3 = 2 q1/p1, b3 = -A mu but uses "
        "V = 8 q1 q2 w / (A (q1 + 2 q2 w)(c1 w + c0)), c0 = -q1 (mu - 1), c1 = -2 q2 (mu + 1), "
        "a1 = 2 mu q1/(A p1), a2 = mu^2 - 1, b1 = -mu^2, b2 = -A mu p1 (mu^2 - 1)/(2 q1). "
        "V is pole-free for |mu| > 1.",
        has_literal=True,
        example={"A": 1.0, "mu": 2.0, "p1": 1.0, "q1": 1.0, "q2": 1.0}),
]}

CASE_IDS = tuple(CASES)


def build_case(case_id, params=None, literal=False) -> CaseSolution:
    """Wave(s) and equation coefficients for a catalog family.

    Missing parameters fall back to the case's example values.
    """
    if case_id not in CASES:
        raise InvalidParams(f"unknown case {case_id!r}; choose from {', '.join(CASE_IDS)}")
    return CASES[case_id].build(params, literal)


# verification -----------------------------------------------------------------

@dataclass
class ResidualResult:
    value: float
    used: int
    excluded: int


def residual_detail(sol: CaseSolution, xi) -> ResidualResult:
    xi = np.asarray(xi, dtype=float)
    for w in sol.waves:
        if np.any(w.pole_mask(xi)):
            raise PoleInSampleSet(f"case {sol.id}: sample set contains a pole")
    if isinstance(sol.equation, BioSystemParams):
        e = sol.equation
        U, V = sol.waves
        u, u1 = U.evaluate(xi), U.evaluate(xi, 1)
        vv, v1, v2 = V.evaluate(xi), V.evaluate(xi, 1), V.evaluate(xi, 2)
        f = e.a[0] * u + e.a[1] * vv + e.a[2] * u * vv
        g = e.b[0] * u + e.b[1] * vv + e.b[2] * u * vv
        r1 = np.abs(e.mu * v1 + e.A * vv * v1 - v2 - f) / (1 + np.abs(f))
        r2 = np.abs(e.mu * u1 - g) / (1 + np.abs(g))
        return ResidualResult(float(max(r1.max(), r2.max())), len(xi), 0)
    e = sol.equation
    w = sol.wave
    keep = np.ones(len(xi), dtype=bool)
    root = None
    if w.power == 2:
        root = w.base(xi)
        if _needs_root_domain(sol):
            keep = root >= 0
    u, u1, u2 = w.evaluate(xi), w.evaluate(xi, 1), w.evaluate(xi, 2)
    f = e.f(u, root)
    r = np.abs(e.delta * u2 + (e.B * e.v + e.A * u) * u1 - f) / (1 + np.abs(f))
    r = r[keep]
    return ResidualResult(float(r.max()) if len(r) else 0.0, int(keep.sum()), int((~keep).sum()))


def condition_estimate(sol: CaseSolution, xi) -> float:
    """Largest ratio (sum of |ODE terms|) / (1 + |source|) over the samples.

    Rounding in double precision leaves a normalised residual of roughly
    this number times machine epsilon even for an exact solution.
    """
    xi = np.asarray(xi, dtype=float)
    if isinstance(sol.equation, BioSystemParams):
        e = sol.equation
        U, V = sol.waves
        u, u1 = U.evaluate(xi), U.evaluate(xi, 1)
        vv, v1, v2 = V.evaluate(xi), V.evaluate(xi, 1), V.evaluate(xi, 2)
        fa = np.abs(e.a[0] * u) + np.abs(e.a[1] * vv) + np.abs(e.a[2] * u * vv)
        ga = np.abs(e.b[0] * u) + np.abs(e.b[1] * vv) + np.abs(e.b[2] * u * vv)
        f = e.a[0] * u + e.a[1] * vv + e.a[2] * u * vv
        g = e.b[0] * u + e.b[1] * vv + e.b[2] * u * vv
        k1 = (np.abs(e.mu * v1) + np.abs(e.A * vv * v1) + np.abs(v2) + fa) / (1 + np.abs(f))
        k2 = (np.abs(e.mu * u1) + ga) / (1 + np.abs(g))
        return float(max(k1.max(), k2.max()))
    e, w = sol.equation, sol.wave
    keep = np.ones(len(xi), dtype=bool)
    root = None
    if w.power == 2:
        root = w.base(xi)
        if _needs_root_domain(sol):
            keep = root >= 0
    u, u1, u2 = w.evaluate(xi), w.evaluate(xi, 1), w.evaluate(xi, 2)
    terms = np.abs(e.delta * u2) + np.abs(e.B * e.v * u1) + np.abs(e.A * u * u1)
    for nu, lam in e.source.items():
        if nu == 0.5:
            terms = terms + np.abs(lam * root)
        elif nu == 1.5:
            terms = terms + np.abs(lam * root * u)
        else:
            terms = terms + np.abs(lam * u ** int(nu))
    k = (terms / (1 + np.abs(e.f(u, root))))[keep]
    return float(k.max()) if len(k) else 0.0


def tw_residual(sol: CaseSolution, xi) -> float:
    """Max normalised residual of the reduced ODE(s) over the samples."""
    return residual_detail(sol, xi).value


def _needs_root_domain(sol):
    eq = sol.equation
    return (isinstance(eq, TWEquation) and sol.wave.power == 2
            and any(eq.source.get(nu, 0) for nu in HALF_POWERS))


def sample_points(sol: CaseSolution, n=200, interval=(-10.0, 10.0), gap=1e-2):
    """``n`` spread-out admissible samples and the number of candidates dropped.

    Candidates closer than ``gap/|alpha|`` to a real pole are dropped, and
    for half-integer sources so are candidates with F/G < 0, where the
    positive branch of u**(1/2) is not F/G.
    """
    cand = np.linspace(interval[0], interval[1], 8 * n)
    ok = np.ones(len(cand), dtype=bool)
    for w in sol.waves:
        for p in singularities(w, interval):
            ok &= np.abs(cand - p) >= gap / abs(w.rate)
    pole_ok = ok.copy()
    if _needs_root_domain(sol):
        ok[pole_ok] &= sol.wave.base(cand[pole_ok]) >= 0
    dropped = int(pole_ok.sum() - ok.sum())
    cand = cand[ok]
    return cand[np.round(np.linspace(0, len(cand) - 1, n)).astype(int)], dropped


def pole_free_samples(sol: CaseSolution, n=200, interval=(-10.0, 10.0)):
    return sample_points(sol, n, interval)[0]


@dataclass
class VerifyReport:
    id: str
    draws: int
    max_residual: float
    failures: int
    rejected_draws: int
    excluded_samples: int
    singular_draws: int
    labels: dict
    ill_conditioned_draws: int = 0
    literal: bool = False
    notes: str = ""

    @property
    def passed(self):
        return self.failures == 0

    def to_dict(self):
        return {"id": self.id, "draws": self.draws, "max_residual": self.max_residual,
                "failures": self.failures, "rejected_draws": self.rejected_draws,
                "excluded_samples": self.excluded_samples, "singular_draws": self.singular_draws,
                "labels": self.labels, "ill_conditioned_draws": self.ill_conditioned_draws,
                "literal": self.literal, "notes": self.notes}

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)


def verify_case(case_id, draws=100, seed=DEFAULT_SEED, samples=200, tol=1e-10,
                literal=False, max_rejections=10_000, max_condition=MAX_CONDITION) -> VerifyReport:
    """Residual check of one family over seeded random admissible draws.

    Draws violating the family's constraints are redrawn, as are draws whose
    :func:`condition_estimate` exceeds ``max_condition`` (rounding alone
    would then approach ``tol``); both are counted in the report.
    """
    case = CASES[case_id]
    rng = np.random.default_rng(seed)
    worst, failures, rejected, excluded, singular, ill = 0.0, 0, 0, 0, 0, 0
    labels = {}
    done = 0
    while done < draws:
        try:
            sol = case.build(case.draw(rng), literal)
        except ConstraintViolation:
            rejected += 1
            if rejected > max_rejections:
                raise
            continue
        xi, dropped = sample_points(sol, samples)
        if condition_estimate(sol, xi) > max_condition:
            ill += 1
            if ill > max_rejections:
                raise ConstraintViolation(f"case {case_id}: no well-conditioned draws")
            continue
        done += 1
        det = residual_detail(sol, xi)
        worst = max(worst, det.value)
        excluded += dropped + det.excluded
        failures += det.value > tol
        if any(singularities(w) for w in sol.waves):
            singular += 1
        label = asymptotics(sol.wave)[2]
        labels[label] = labels.get(label, 0) + 1
    return VerifyReport(case_id, draws, worst, failures, rejected, excluded, singular,
                        labels, ill, literal, case.notes)
