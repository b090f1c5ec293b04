"""Homoclinic bifurcation of the scaled GBE system by manifold shooting.

The unstable manifold of the saddle B0 is shot forward and the stable
manifold backward, both up to the section {W = 0, U > 0.5}.  The signed gap
between the two section values changes sign at the homoclinic parameter
mu*, which is then located by safeguarded false position.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from enum import Enum

import numpy as np

from .errors import (IntegrationError, InvalidParams, NoSignChange,
                     SectionMiss)
from .integrate import EventSpec, Trajectory, integrate_adaptive
from .model import PhaseState, gbe_field, jacobian, saddle_rates

SECTION_U_MIN = 0.5
#: shots are abandoned once |state| exceeds this, long before the 1e8 guard
SHOT_ESCAPE = 1e3


def manifold_seed(A, mu, which="unstable", offset=1e-6) -> PhaseState:
    """Point at distance ``offset`` from B0 along an eigendirection, U > 0.

    At B0 the Jacobian is [[0, -1], [-1, -A mu]], so the eigenvector for
    eigenvalue lam is proportional to (1, -lam).
    """
    if offset <= 0:
        raise InvalidParams("offset must be positive")
    alpha, beta = saddle_rates(A, mu)
    lam = {"unstable": alpha, "stable": -beta}.get(which)
    if lam is None:
        raise InvalidParams("which must be 'unstable' or 'stable'")
    n = math.hypot(1.0, lam)
    return PhaseState(offset / n, -lam * offset / n)


def _section_event():
    return EventSpec(lambda T, y: y[1], direction=0, terminal=True,
                     accept=lambda y: y[0] > SECTION_U_MIN)


@dataclass(frozen=True)
class Shot:
    """One manifold shot ending on the section."""

    trajectory: Trajectory
    T_hit: float
    U_hit: float


def shoot(A, mu, which, offset=1e-6, tol=1e-10, t_budget=200.0) -> Shot:
    """Follow one branch of B0's manifold to its first section crossing."""
    y0 = manifold_seed(A, mu, which, offset)
    span = (0.0, t_budget) if which == "unstable" else (0.0, -t_budget)
    try:
        traj, hits = integrate_adaptive(gbe_field(A, mu), y0, span, tol, tol,
                                        events=[_section_event()], blowup=SHOT_ESCAPE)
    except IntegrationError as exc:
        raise SectionMiss(f"{which} shot at mu={mu} escaped before the section: {exc}") from exc
    if not hits:
        raise SectionMiss(f"{which} shot at mu={mu} missed the section within T budget {t_budget}")
    return Shot(traj, hits[0].T, float(hits[0].state[0]))


def shoot_mismatch(A, mu, offset=1e-6, tol=1e-10, t_budget=200.0) -> float:
    """m(mu) = U_unstable - U_stable on the section W = 0, U > 0.5."""
    if tol <= 0:
        raise InvalidParams("tol must be positive")
    up = shoot(A, mu, "unstable", offset, tol, t_budget)
    down = shoot(A, mu, "stable", offset, tol, t_budget)
    return up.U_hit - down.U_hit


@dataclass
class HomoclinicResult:
    A: float
    mu_star: float
    x_star: float
    alpha: float
    beta: float
    mismatch: float
    iterations: int
    mismatch_history: list = field(default_factory=list)
    tolerances: dict = field(default_factory=dict)

    def to_dict(self):
        d = asdict(self)
        d["mismatch_history"] = [list(p) for p in self.mismatch_history]
        return d

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)


def find_homoclinic(A=1.0, bracket=(-0.9, -0.8), mu_tol=1e-6, mismatch_tol=1e-8,
                    offset=1e-6, tol=1e-10, t_budget=200.0, max_iter=100):
    """Locate mu* where the manifold mismatch vanishes.

    Illinois false position on m(mu); whenever an update fails to shrink the
    bracket by half a plain bisection step is taken instead.  Stops when
    the bracket is narrower than ``mu_tol`` and |m| <= ``mismatch_tol``
    (or when |m| reaches zero to working precision).
    """
    if A <= 0:
        raise InvalidParams("A must be positive")
    lo, hi = float(bracket[0]), float(bracket[1])
    if not lo < hi:
        raise InvalidParams("bracket must be increasing")

    def m(mu):
        val = shoot_mismatch(A, mu, offset, tol, t_budget)
        history.append((mu, val))
        return val

    history = []
    try:
        m_lo, m_hi = m(lo), m(hi)
    except SectionMiss as exc:
        raise NoSignChange(f"mismatch undefined at a bracket end: {exc}") from exc
    if m_lo * m_hi > 0:
        raise NoSignChange(f"m({lo})={m_lo:.3e} and m({hi})={m_hi:.3e} have the same sign")

    best = min(((lo, m_lo), (hi, m_hi)), key=lambda p: abs(p[1]))
    side = 0
    it = 0
    for it in range(1, max_iter + 1):
        if best[1] == 0.0 or (hi - lo <= mu_tol and abs(best[1]) <= mismatch_tol):
            break
        width = hi - lo
        if m_hi != m_lo:
            mu = hi - m_hi * (hi - lo) / (m_hi - m_lo)
        else:
            mu = 0.5 * (lo + hi)
        if not lo < mu < hi:
            mu = 0.5 * (lo + hi)
        val = m(mu)
        if abs(val) < abs(best[1]):
            best = (mu, val)
        if (val > 0) == (m_lo > 0):
            lo, m_lo = mu, val
            if side == 1:
                m_hi *= 0.5
            side = 1
        else:
            hi, m_hi = mu, val
            if side == -1:
                m_lo *= 0.5
            side = -1
        if hi - lo > 0.5 * width and hi - lo > mu_tol:
            # slow shrink: force a bisection step
            mid = 0.5 * (lo + hi)
            vm = m(mid)
            if abs(vm) < abs(best[1]):
                best = (mid, vm)
            if (vm > 0) == (m_lo > 0):
                lo, m_lo = mid, vm
            else:
                hi, m_hi = mid, vm
            side = 0

    mu_star, m_star = best
    x_star = shoot(A, mu_star, "unstable", offset, tol, t_budget).U_hit
    alpha, beta = saddle_rates(A, mu_star)
    return HomoclinicResult(
        A=A, mu_star=mu_star, x_star=x_star, alpha=alpha, beta=beta,
        mismatch=m_star, iterations=it, mismatch_history=history,
        tolerances={"mu_tol": mu_tol, "mismatch_tol": mismatch_tol, "offset": offset,
                    "abs_tol": tol, "rel_tol": tol, "t_budget": t_budget,
                    "bracket_width": hi - lo})


class RegimeLabel(str, Enum):
    CYCLE = "cycle_regime"
    HOMOCLINIC = "homoclinic"
    CONNECTION = "connection_regime"


def classify_regime(A, mu, mu_star, tol=5e-3) -> RegimeLabel:
    if abs(mu - mu_star) <= tol:
        return RegimeLabel.HOMOCLINIC
    return RegimeLabel.CYCLE if mu < mu_star else RegimeLabel.CONNECTION


@dataclass(frozen=True)
class HomoclinicBranches:
    """Numerical homoclinic halves re-timed so that T = 0 on the section.

    ``upper`` is the unstable-manifold half (T <= 0, leaves B0 like
    exp(alpha*T)); ``lower`` the stable-manifold half (T >= 0, decays
    like exp(-beta*T)).
    """

    upper: Trajectory
    lower: Trajectory
    x_upper: float
    x_lower: float


def homoclinic_branches(A, mu, offset=1e-6, tol=1e-12, t_budget=200.0) -> HomoclinicBranches:
    up = shoot(A, mu, "unstable", offset, tol, t_budget)
    down = shoot(A, mu, "stable", offset, tol, t_budget)
    return HomoclinicBranches(up.trajectory.shifted(-up.T_hit),
                              down.trajectory.shifted(-down.T_hit),
                              up.U_hit, down.U_hit)


def default_seeds(A, mu, eps=1e-4):
    """Both branches of B0's manifolds plus small offsets around B1 and B2."""
    seeds = []
    for which in ("unstable", "stable"):
        s = manifold_seed(A, mu, which, eps)
        seeds += [s, PhaseState(-s.U, -s.W)]
    for U in (-1.0, 1.0):
        seeds += [PhaseState(U + eps, 0.0), PhaseState(U - eps, 0.0)]
    return seeds


def _orbit(A, mu, seed, t_end, tol, escape):
    try:
        traj, _ = integrate_adaptive(gbe_field(A, mu), seed, (0.0, t_end), tol, tol,
                                     blowup=escape, max_steps=50_000)
        traj.meta["truncated"] = False
    except IntegrationError as exc:
        traj = exc.trajectory
        traj.meta["truncated"] = True
    traj.meta.update(seed=tuple(float(v) for v in seed),
                     direction="forward" if t_end > 0 else "backward")
    return traj


def portrait(A, mu, seeds=None, t_budget=50.0, tol=1e-9, escape=50.0, workers=1):
    """Forward and backward orbits through each seed.

    Orbits leaving the disc of radius ``escape`` are truncated there and
    flagged with ``meta["truncated"] = True``.
    """
    if t_budget <= 0:
        raise InvalidParams("t_budget must be positive")
    if seeds is None:
        seeds = default_seeds(A, mu)
    jobs = [(s, sgn * t_budget) for s in seeds for sgn in (1.0, -1.0)]
    run = lambda job: _orbit(A, mu, job[0], job[1], tol, escape)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(run, jobs))
    return [run(j) for j in jobs]


def distance_to(point, state):
    return float(np.hypot(state[0] - point[0], state[1] - point[1]))


def saddle_jacobian(A, mu):
    return jacobian((0.0, 0.0), A, mu)
