"""Travelling waves of rational-exponential form u(xi) = (F(w)/G(w))**p, w = exp(alpha*xi).

Derivatives are exact: with theta = w d/dw (so d/dxi = alpha*theta) acting on
ascending coefficient lists as c_k -> k c_k,

    R'  = alpha   (thF G - F thG) / G**2
    R'' = alpha**2 [(th2F G - F th2G) / G**2 - 2 thG (thF G - F thG) / G**3]

and the outer power is handled by the chain rule.  For w > 1 every
polynomial is evaluated as w**-d P(w) with exponents (k - d) alpha xi, so
no term overflows; the formulas above are homogeneous of degree zero and
the common factor cancels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDenominator, InvalidParams, PoleAt

POLE_RTOL = 1e-13


def _trim(c):
    c = [float(v) for v in c]
    while len(c) > 1 and c[-1] == 0.0:
        c.pop()
    return tuple(c)


@dataclass(frozen=True)
class RationalExpWave:
    rate: float
    num: tuple
    den: tuple
    power: int = 1
    speed: float | None = None

    def __post_init__(self):
        num, den = _trim(self.num), _trim(self.den)
        if not any(den):
            raise DegenerateDenominator("denominator polynomial is identically zero")
        if self.rate == 0:
            raise InvalidParams("rate must be nonzero")
        if self.power not in (1, 2):
            raise InvalidParams("power must be 1 or 2")
        lead = next(v for v in den if v != 0.0)
        if lead < 0:
            num, den = tuple(-v for v in num), tuple(-v for v in den)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)
        object.__setattr__(self, "rate", float(self.rate))

    @property
    def degree(self):
        return max(len(self.num), len(self.den)) - 1

    def shifted(self, c):
        """The wave translated by xi -> xi + c."""
        s = math.exp(self.rate * c)
        return RationalExpWave(self.rate, [v * s ** k for k, v in enumerate(self.num)],
                               [v * s ** k for k, v in enumerate(self.den)], self.power, self.speed)

    # -- evaluation --------------------------------------------------------
    def _scaled(self, xi):
        """Scaled polynomial values and the pole flag at each xi."""
        xi = np.asarray(xi, dtype=float)
        t = self.rate * xi
        d = self.degree
        shift = np.where(t > 0, d, 0)  # evaluate w**-d P(w) where w > 1

        def values(c):
            k = np.arange(len(c))
            E = np.exp(np.multiply.outer(t, np.ones(len(c))) * (k - shift[..., None]))
            c = np.asarray(c)
            return E @ c, E @ (k * c), E @ (k * k * c)

        F = values(self.num)
        G = values(self.den)
        gnorm = max(abs(v) for v in self.den)
        dg = len(self.den) - 1
        thresh = POLE_RTOL * gnorm * np.exp(np.where(t > 0, (dg - d) * t, 0.0))
        return F, G, np.abs(G[0]) < thresh

    def pole_mask(self, xi):
        return self._scaled(xi)[2]

    def evaluate(self, xi, order=0):
        """u, u' or u'' at ``xi`` (scalar or array).

        Raises
        ------
        PoleAt
            at the first sample where the denominator vanishes numerically.
        """
        if order not in (0, 1, 2):
            raise InvalidParams("order must be 0, 1 or 2")
        (F, F1, F2), (G, G1, G2), pole = self._scaled(xi)
        if np.any(pole):
            bad = np.atleast_1d(np.asarray(xi, dtype=float))[np.atleast_1d(pole)][0]
            raise PoleAt(float(bad))
        a = self.rate
        R = F / G
        if order == 0:
            out = R ** self.power
        else:
            W = F1 * G - F * G1
            R1 = a * W / G ** 2
            if order == 1:
                out = R1 if self.power == 1 else 2 * R * R1
            else:
                R2 = a * a * ((F2 * G - F * G2) / G ** 2 - 2 * G1 * W / G ** 3)
                out = R2 if self.power == 1 else 2 * (R1 * R1 + R * R2)
        return float(out) if np.ndim(out) == 0 else out

    def base(self, xi):
        """F/G itself (for p = 2 this is the signed square root of u)."""
        (F, _, _), (G, _, _), pole = self._scaled(xi)
        if np.any(pole):
            bad = np.atleast_1d(np.asarray(xi, dtype=float))[np.atleast_1d(pole)][0]
            raise PoleAt(float(bad))
        out = F / G
        return float(out) if np.ndim(out) == 0 else out

    def __call__(self, xi):
        return self.evaluate(xi, 0)


def evaluate(wave: RationalExpWave, xi, order=0):
    return wave.evaluate(xi, order)


def _polish_root(c_desc, r, iters=30):
    p = np.poly1d(c_desc)
    dp = p.deriv()
    for _ in range(iters):
        d = dp(r)
        if d == 0:
            break
        step = p(r) / d
        r -= step
        if abs(step) <= 1e-15 * max(1.0, abs(r)):
            break
    return r


def singularities(wave: RationalExpWave, xi_interval=(-math.inf, math.inf)):
    """Real poles: positive real roots w of G mapped to xi = ln(w)/alpha."""
    den = np.array(wave.den)
    nz = np.nonzero(den)[0]
    den = den[nz[0]:]  # factors of w never vanish for finite xi
    if len(den) < 2:
        return []
    roots = np.roots(den[::-1])
    out = []
    for r in roots:
        if abs(r.imag) <= 1e-9 * max(1.0, abs(r)) and r.real > 0:
            w = _polish_root(den[::-1], float(r.real))
            if w > 0:
                xi = math.log(w) / wave.rate
                if xi_interval[0] <= xi <= xi_interval[1]:
                    out.append(xi)
    return sorted(out)


def _limit_at_zero(num, den):
    j = next(i for i, v in enumerate(den) if v != 0.0)
    if any(v != 0.0 for v in num[:j]):
        return math.inf
    return (num[j] if j < len(num) else 0.0) / den[j]


def asymptotics(wave: RationalExpWave, probe=(-12.0, 12.0), samples=2001):
    """(limit at -inf, limit at +inf, label) with label in
    {"kink", "soliton", "singular", "constant"}."""
    num, den = list(wave.num), list(wave.den)
    n = max(len(num), len(den))
    num += [0.0] * (n - len(num))
    den += [0.0] * (n - len(den))
    low = _limit_at_zero(num, den)
    high = _limit_at_zero(num[::-1], den[::-1])
    if wave.rate < 0:
        low, high = high, low
    low, high = low ** wave.power, high ** wave.power
    if singularities(wave) or not (math.isfinite(low) and math.isfinite(high)):
        return low, high, "singular"
    scale = 1.0 + max(abs(low), abs(high))
    if abs(low - high) > 1e-12 * scale:
        return low, high, "kink"
    xi = np.linspace(probe[0] / abs(wave.rate), probe[1] / abs(wave.rate), samples)
    dev = np.max(np.abs(wave.evaluate(xi) - low))
    return low, high, ("soliton" if dev > 1e-9 * scale else "constant")
