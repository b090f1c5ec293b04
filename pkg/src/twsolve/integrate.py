"""Adaptive Dormand-Prince 5(4) integration with dense output and events,
plus the quadrature for the time of flight along Hamiltonian level sets.

The planar systems here are tiny, so the stepper works on plain Python
floats; numpy is only used to store and interpolate finished trajectories.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.polynomial import polynomial as P
from scipy import integrate as _sp_integrate

from .errors import (MaxStepsExceeded, RadicandNegative, StepSizeUnderflow,
                     TurningPointOrderTooHigh)

BLOWUP = 1e8
EVENT_TOL = 1e-12

# Dormand & Prince (1980) tableau, FSAL
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)


@dataclass
class EventSpec:
    """Root of ``g(T, y)`` to detect along a trajectory.

    ``direction`` is +1 for g rising, -1 for falling, 0 for either, measured
    in the order the trajectory is traversed (so for a backward integration
    "rising" means g increases as T decreases).  ``accept`` optionally filters
    located roots by state, e.g. to restrict a section to U > 0.5.
    """

    g: Callable
    direction: int = 0
    terminal: bool = False
    accept: Callable | None = None


@dataclass(frozen=True)
class EventHit:
    T: float
    state: tuple
    event_index: int


@dataclass
class Trajectory:
    """Accepted integration nodes with a piecewise cubic Hermite interpolant."""

    t: np.ndarray
    y: np.ndarray
    dy: np.ndarray
    atol: float
    rtol: float
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.y = np.asarray(self.y, dtype=float).reshape(len(self.t), -1)
        self.dy = np.asarray(self.dy, dtype=float).reshape(self.y.shape)
        # ascending views for searching
        if len(self.t) > 1 and self.t[-1] < self.t[0]:
            self._ts, self._ys, self._dys = self.t[::-1], self.y[::-1], self.dy[::-1]
        else:
            self._ts, self._ys, self._dys = self.t, self.y, self.dy

    @property
    def t_min(self):
        return float(self._ts[0])

    @property
    def t_max(self):
        return float(self._ts[-1])

    @property
    def final(self):
        return tuple(self.y[-1])

    def __len__(self):
        return len(self.t)

    def __call__(self, T):
        """State at time(s) ``T`` (scalar -> shape (d,), array -> (m, d))."""
        Tq = np.atleast_1d(np.asarray(T, dtype=float))
        ts = self._ts
        if len(ts) == 1:
            out = np.repeat(self._ys[:1], len(Tq), axis=0)
        else:
            if np.any(Tq < ts[0] - 1e-12) or np.any(Tq > ts[-1] + 1e-12):
                raise ValueError("requested time outside trajectory span")
            i = np.clip(np.searchsorted(ts, Tq, side="right") - 1, 0, len(ts) - 2)
            h = (ts[i + 1] - ts[i])[:, None]
            s = ((Tq - ts[i]) / (ts[i + 1] - ts[i]))[:, None]
            y0, y1 = self._ys[i], self._ys[i + 1]
            d0, d1 = self._dys[i], self._dys[i + 1]
            s2, s3 = s * s, s * s * s
            out = ((2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * d0
                   + (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * h * d1)
            # node times reproduce node states exactly
            exact = Tq == ts[i]
            out[exact] = y0[exact]
            exact = Tq == ts[i + 1]
            out[exact] = y1[exact]
        return out[0] if np.ndim(T) == 0 else out

    def shifted(self, dt):
        """Same orbit with time relabelled T -> T + dt."""
        return Trajectory(self.t + dt, self.y.copy(), self.dy.copy(),
                          self.atol, self.rtol, dict(self.meta))


def _hermite_scalar(t0, t1, y0, y1, d0, d1, T):
    h = t1 - t0
    s = (T - t0) / h
    s2 = s * s
    s3 = s2 * s
    a, b, c, d = 2 * s3 - 3 * s2 + 1, (s3 - 2 * s2 + s) * h, -2 * s3 + 3 * s2, (s3 - s2) * h
    return tuple(a * p + b * q + c * r + d * w for p, q, r, w in zip(y0, d0, y1, d1))


def _refine_root(fun, ta, tb, ga, gb, tol=EVENT_TOL, maxit=200):
    """Illinois false position with a bisection safeguard on [ta, tb]."""
    side = 0
    for _ in range(maxit):
        if abs(tb - ta) <= tol:
            break
        tc = tb - gb * (tb - ta) / (gb - ga) if gb != ga else 0.5 * (ta + tb)
        lo, hi = min(ta, tb), max(ta, tb)
        # keep the secant point safely inside, else bisect
        margin = 0.01 * (hi - lo)
        if not (lo + margin <= tc <= hi - margin):
            tc = 0.5 * (ta + tb)
        gc = fun(tc)
        if gc == 0.0:
            return tc
        if (gc > 0) == (gb > 0):
            tb, gb = tc, gc
            if side == -1:
                ga *= 0.5
            side = -1
        else:
            ta, ga = tc, gc
            if side == 1:
                gb *= 0.5
            side = 1
    return ta if abs(ga) < abs(gb) else tb


def _initial_step(f, t0, y0, f0, direction, atol, rtol):
    sc = [atol + rtol * abs(v) for v in y0]
    d0 = math.sqrt(sum((v / s) ** 2 for v, s in zip(y0, sc)) / len(y0))
    d1 = math.sqrt(sum((v / s) ** 2 for v, s in zip(f0, sc)) / len(y0))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    y1 = [v + direction * h0 * w for v, w in zip(y0, f0)]
    f1 = f(t0 + direction * h0, y1)
    d2 = math.sqrt(sum(((a - b) / s) ** 2 for a, b, s in zip(f1, f0, sc)) / len(y0)) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1)


def integrate_adaptive(field_fn, y0, t_span, abs_tol=1e-10, rel_tol=1e-10, events=(),
                       max_steps=200_000, max_step=math.inf, blowup=BLOWUP):
    """Integrate ``y' = field_fn(T, y)`` over ``t_span`` (either orientation).

    Returns ``(trajectory, hits)``.  Integration stops at the first hit of a
    terminal event; the trajectory then ends exactly at the hit.

    Raises
    ------
    StepSizeUnderflow
        if the step size collapses or any |y_i| exceeds ``blowup``.  The
        partial trajectory is attached as ``exc.trajectory``.
    MaxStepsExceeded
        after ``max_steps`` accepted or rejected steps (partial trajectory
        attached the same way).
    """
    if abs_tol <= 0 or rel_tol <= 0:
        raise ValueError("tolerances must be positive")
    t0, t1 = float(t_span[0]), float(t_span[1])
    if t0 == t1:
        raise ValueError("empty time span")
    direction = 1.0 if t1 > t0 else -1.0
    f = field_fn
    y = tuple(float(v) for v in y0)
    n = len(y)
    fy = tuple(f(t0, y))
    ts, ys, dys = [t0], [y], [fy]
    hits = []
    gvals = [ev.g(t0, y) for ev in events]

    def build(meta=None):
        return Trajectory(np.array(ts), np.array(ys), np.array(dys), abs_tol, rel_tol, meta or {})

    h = min(_initial_step(f, t0, y, fy, direction, abs_tol, rel_tol), max_step, abs(t1 - t0))
    err_old = 1e-4
    t = t0
    steps = 0
    while direction * (t1 - t) > 0:
        steps += 1
        if steps > max_steps:
            exc = MaxStepsExceeded(f"no convergence after {max_steps} steps at T={t}")
            exc.trajectory = build({"truncated": True})
            raise exc
        if h < 16 * np.finfo(float).eps * max(1.0, abs(t)):
            exc = StepSizeUnderflow(f"step size underflow at T={t}")
            exc.trajectory = build({"truncated": True})
            raise exc
        last = h >= abs(t1 - t)
        if last:
            h = abs(t1 - t)
        hs = direction * h
        k = [fy]
        for s in range(1, 7):
            row = _A[s]
            yi = tuple(y[j] + hs * sum(a * kk[j] for a, kk in zip(row, k)) for j in range(n))
            k.append(tuple(f(t + _C[s] * hs, yi)))
        y_new = yi  # row 6 holds the 5th order weights (FSAL)
        f_new = k[6]
        err = 0.0
        for j in range(n):
            e = hs * sum(c * kk[j] for c, kk in zip(_E, k))
            sc = abs_tol + rel_tol * max(abs(y[j]), abs(y_new[j]))
            err = max(err, abs(e) / sc)
        if not math.isfinite(err):
            h *= 0.2
            continue
        if err > 1.0:
            h *= max(0.2, 0.9 * err ** -0.2)
            continue

        t_new = t if last else t + hs
        if last:
            t_new = t1
        # accepted step -------------------------------------------------
        stop = False
        for idx, ev in enumerate(events):
            g_new = ev.g(t_new, y_new)
            g_old = gvals[idx]
            gvals[idx] = g_new
            if g_old == 0.0 or not (g_old * g_new < 0 or g_new == 0.0):
                continue
            rising = g_new > g_old
            if ev.direction and (rising != (ev.direction > 0)):
                continue
            if g_new == 0.0:
                th = t_new
            else:
                fun = lambda tt: ev.g(tt, _hermite_scalar(t, t_new, y, y_new, fy, f_new, tt))
                th = _refine_root(fun, t, t_new, g_old, g_new)
            yh = y_new if th == t_new else _hermite_scalar(t, t_new, y, y_new, fy, f_new, th)
            if ev.accept is not None and not ev.accept(yh):
                continue
            hits.append(EventHit(th, yh, idx))
            if ev.terminal:
                stop = True
                t_new, y_new, f_new = th, yh, tuple(f(th, yh))
                break
        if t_new != t:
            t, y, fy = t_new, y_new, f_new
            ts.append(t)
            ys.append(y)
            dys.append(fy)
        if stop:
            break
        if max(abs(v) for v in y) > blowup:
            exc = StepSizeUnderflow(f"state exceeded blowup guard {blowup:g} at T={t}")
            exc.trajectory = build({"truncated": True})
            raise exc
        fac = 0.9 * max(err, 1e-10) ** -0.17 * err_old ** 0.04
        h = min(h * min(10.0, max(0.2, fac)), max_step)
        err_old = max(err, 1e-4)

    return build(), hits


# time of flight -------------------------------------------------------------

def _radicand_coeffs(case, H):
    """Ascending coefficients of 2H + 2/delta * potential(u)."""
    l0, l1, l2, l3 = case.lambdas
    d = case.delta
    return np.array([2 * H, 2 * l0 / d, l1 / d, 2 * l2 / (3 * d), l3 / (2 * d)])


def _taylor_shift(c, a):
    """Coefficients of p(a + x) given ascending coefficients of p."""
    out = np.zeros_like(c)
    for k in range(len(c) - 1, -1, -1):
        out = np.concatenate(([0.0], out[:-1])) + a * out
        out[0] += c[k]
    return out


def time_of_flight(case, H, u_from, u_to, rtol=1e-11):
    """Travel time ``int du / sqrt(2H + 2 F(u)/delta)`` between two amplitudes.

    Endpoints where the radicand vanishes are treated as simple turning
    points via ``u = u_turn +- s**2``; the shifted polynomial is divided by
    its (zero) constant term so the transformed integrand stays smooth.
    The result is signed by the orientation ``u_from -> u_to``.
    """
    if u_from == u_to:
        return 0.0
    sign = 1.0 if u_to > u_from else -1.0
    a, b = min(u_from, u_to), max(u_from, u_to)
    c = _radicand_coeffs(case, H)
    R = lambda u: P.polyval(u, c)
    scale = np.sum(np.abs(c) * np.maximum(1.0, max(abs(a), abs(b))) ** np.arange(5))
    ztol = 1e-9 * scale

    def turning(u):
        r = R(u)
        if r < -ztol:
            raise RadicandNegative(f"radicand {r:.3e} < 0 at endpoint u={u}")
        if abs(r) > ztol:
            return False
        if abs(P.polyval(u, P.polyder(c))) <= 1e-7 * scale:
            raise TurningPointOrderTooHigh(f"turning point at u={u} is not simple")
        return True

    ta, tb = turning(a), turning(b)
    probe = np.linspace(a, b, 257)[1:-1]
    if np.any(R(probe) <= 0):
        raise RadicandNegative("radicand leaves the real domain inside the interval")

    def piece(lo, hi, turn_at):
        if turn_at is None:
            val, _ = _sp_integrate.quad(lambda u: 1.0 / math.sqrt(R(u)), lo, hi,
                                        epsabs=0.0, epsrel=rtol, limit=200)
            return val
        if turn_at == "lo":
            u0, sgn, width = lo, 1.0, hi - lo
        else:
            u0, sgn, width = hi, -1.0, hi - lo
        q = _taylor_shift(c, u0)[1:]  # R(u0 + x) = x * Q(x)

        def integrand(s):
            x = sgn * s * s
            return 2.0 / math.sqrt(sgn * P.polyval(x, q))
        val, _ = _sp_integrate.quad(integrand, 0.0, math.sqrt(width),
                                    epsabs=0.0, epsrel=rtol, limit=200)
        return val

    if ta and tb:
        m = 0.5 * (a + b)
        total = piece(a, m, "lo") + piece(m, b, "hi")
    elif ta:
        total = piece(a, b, "lo")
    elif tb:
        total = piece(a, b, "hi")
    else:
        total = piece(a, b, None)
    return sign * total


def turning_points(case, H, around):
    """Nearest real roots of the radicand on either side of ``around``."""
    c = _radicand_coeffs(case, H)
    roots = np.roots(c[::-1])
    real = np.sort(roots[np.abs(roots.imag) <= 1e-9 * (1 + np.abs(roots))].real)
    left, right = real[real < around], real[real > around]
    if not len(left) or not len(right):
        raise RadicandNegative("level set is not a closed orbit around the given point")
    return float(left[-1]), float(right[0])


def orbit_period(case, H, center):
    """Period of the closed orbit at energy ``H`` around ``center``."""
    lo, hi = turning_points(case, H, center)
    return 2.0 * time_of_flight(case, H, lo, hi)
