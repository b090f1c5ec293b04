"""Command-line front end: ``twsolve <command> [options]``.

Exit codes: 0 ok, 2 usage, 3 integration failure, 4 bracketing failure,
5 series failure, 6 verification failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .catalog import CASE_IDS, CASES, DEFAULT_SEED, verify_case
from .errors import (ConstraintViolation, IntegrationError, InvalidParams, NoSignChange,
                     SectionMiss, SeriesError)
from .expseries import branch_error, build_approximant
from .homoclinic import find_homoclinic, homoclinic_branches, portrait
from .integrate import integrate_adaptive
from .io import csv_text, emit, json_text, read_config
from .model import (HamiltonianCase, PhaseState, hamiltonian_energy, hamiltonian_equilibria)

EXIT_OK, EXIT_USAGE, EXIT_INTEGRATION, EXIT_BRACKET, EXIT_SERIES, EXIT_VERIFY = 0, 2, 3, 4, 5, 6

FIG1_LAMBDAS = (2.0, -11.0, 15.0, -6.0)


class UsageError(Exception):
    pass


def workers():
    """Worker cap from TWSOLVE_THREADS (default 1)."""
    try:
        n = int(os.environ.get("TWSOLVE_THREADS", "1"))
    except ValueError:
        n = 1
    return max(1, min(n, os.cpu_count() or 1))


def _interval(text):
    try:
        lo, hi = (float(s) for s in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}")
    if not lo < hi:
        raise argparse.ArgumentTypeError("interval must satisfy LO < HI")
    return lo, hi


def _positive(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _count(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _meta(args, **tolerances):
    flags = {k: (list(v) if isinstance(v, tuple) else v) for k, v in sorted(vars(args).items())
             if k not in ("func", "config")}
    return {"program": "twsolve", "version": __version__, "command": args.command,
            "flags": flags, "tolerances": tolerances}


# commands -------------------------------------------------------------------

def _read_seeds(path):
    seeds = []
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line or line.lower().startswith("u"):
                continue
            parts = line.replace(",", " ").split()
            if len(parts) != 2:
                raise UsageError(f"seed line needs two numbers: {line!r}")
            seeds.append(PhaseState(float(parts[0]), float(parts[1])))
    if not seeds:
        raise UsageError(f"seeds file {path} is empty")
    return seeds


def cmd_portrait(args):
    seeds = _read_seeds(args.seeds) if args.seeds else None
    trajs = portrait(args.A, args.mu, seeds, args.t_budget, args.tol, args.escape, workers())
    rows = []
    for i, tr in enumerate(trajs):
        order = np.argsort(tr.t)
        rows += [(i, tr.t[j], tr.y[j, 0], tr.y[j, 1]) for j in order]
    emit(csv_text(["trajectory_id", "T", "U", "W"], rows), args.out)
    if args.meta:
        info = [{"trajectory_id": i, **{k: v for k, v in tr.meta.items()}} for i, tr in enumerate(trajs)]
        emit(json_text({"meta": _meta(args, abs_tol=args.tol, rel_tol=args.tol), "trajectories": info}),
             args.meta)
    return EXIT_OK


def cmd_homoclinic(args):
    res = find_homoclinic(args.A, args.bracket, args.mu_tol, args.mismatch_tol,
                          args.offset, args.tol, args.t_budget)
    out = res.to_dict()
    out["alpha_beta"] = res.alpha * res.beta
    out["meta"] = _meta(args, **res.tolerances)
    emit(json_text(out), args.out)
    return EXIT_OK


def cmd_series(args):
    approx = build_approximant(args.A, args.mu, args.xstar, args.Nl, args.Nu)
    T = np.linspace(args.t_range[0], args.t_range[1], args.samples)
    U = approx(T)
    header, cols = ["T", "U"], [T, U]
    out = approx.to_dict()
    if args.compare:
        br = homoclinic_branches(args.A, args.mu, tol=1e-12)
        ref = np.full_like(T, np.nan)
        up = (T >= br.upper.t_min) & (T <= 0)
        lo = (T > 0) & (T <= br.lower.t_max)
        ref[up] = br.upper(T[up])[:, 0]
        ref[lo] = br.lower(T[lo])[:, 0]
        header.append("U_reference")
        cols.append(ref)
        out["comparison"] = {
            "lower_sup_error_0_6": branch_error(approx.lower, br.lower, (0.0, 6.0)),
            "upper_sup_error_m6_0": branch_error(approx.upper, br.upper, (-6.0, 0.0)),
            "reference_section_values": [br.x_upper, br.x_lower]}
    out["meta"] = _meta(args)
    emit(json_text(out), args.out)
    if args.profile:
        emit(csv_text(header, zip(*cols)), args.profile)
    return EXIT_OK


def cmd_verify(args):
    ids = CASE_IDS if args.case == "all" else (args.case,)
    if args.case != "all" and args.case not in CASE_IDS:
        raise UsageError(f"unknown case {args.case!r}; choose from all, {', '.join(CASE_IDS)}")
    # cases without a corrected variant have a single form
    run = lambda cid: verify_case(cid, args.draws, args.seed, args.samples, args.threshold,
                                  literal=args.literal and (args.case != "all" or CASES[cid].has_literal))
    if workers() > 1 and len(ids) > 1:
        with ThreadPoolExecutor(workers()) as pool:
            reports = list(pool.map(run, ids))
    else:
        reports = [run(cid) for cid in ids]
    failed = [r.id for r in reports if not r.passed]
    out = {"cases": [r.to_dict() for r in reports], "threshold": args.threshold,
           "all_passed": not failed, "failed": failed,
           "meta": _meta(args, residual_threshold=args.threshold)}
    emit(json_text(out), args.out)
    return EXIT_OK if not failed else EXIT_VERIFY


def cmd_hamiltonian(args):
    lambdas = (args.lambda0, args.lambda1, args.lambda2, args.lambda3)
    if args.lambda3 == 0:
        raise UsageError("--lambda3 must be nonzero")
    case = HamiltonianCase(args.delta, lambdas)
    eqs = hamiltonian_equilibria(case)
    field_fn = case.field()
    rows, orbits = [], []
    for i, u0 in enumerate(np.linspace(args.u_range[0], args.u_range[1], args.levels)):
        y0 = (float(u0), 0.0)
        H0 = hamiltonian_energy(y0, case)
        try:
            tr, _ = integrate_adaptive(field_fn, y0, (0.0, args.t_end), args.tol, args.tol,
                                       blowup=args.escape)
            truncated = False
        except IntegrationError as exc:
            tr, truncated = exc.trajectory, True
        H = np.array([hamiltonian_energy(s, case) for s in tr.y])
        drift = float(np.max(np.abs(H - H0)))
        orbits.append({"orbit_id": i, "U0": float(u0), "H": H0, "energy_drift": drift,
                       "truncated": truncated})
        rows += [(i, H0, t, s[0], s[1]) for t, s in zip(tr.t, tr.y)]
    emit(csv_text(["orbit_id", "H", "T", "U", "W"], rows), args.out)
    info = {"equilibria": [{"U": u, "kind": k, "H": hamiltonian_energy((u, 0.0), case)} for u, k in eqs],
            "orbits": orbits, "meta": _meta(args, abs_tol=args.tol, rel_tol=args.tol)}
    emit(json_text(info), args.json)
    return EXIT_OK


# parser ---------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(prog="twsolve",
                                     description="Travelling waves of generalized Burgers-type equations.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", help="key=value file; command-line flags take precedence")
        p.set_defaults(func=func)
        return p

    p = add("portrait", cmd_portrait, "phase portrait trajectories as CSV")
    p.add_argument("--A", type=_positive, default=1.0)
    p.add_argument("--mu", type=float, default=-0.836)
    p.add_argument("--seeds", help="file with one 'U W' pair per line (default: manifold and equilibrium seeds)")
    p.add_argument("--t-budget", type=_positive, default=50.0)
    p.add_argument("--tol", type=_positive, default=1e-9)
    p.add_argument("--escape", type=_positive, default=50.0, help="truncate orbits beyond this radius")
    p.add_argument("--out", help="CSV path (default stdout)")
    p.add_argument("--meta", help="optional JSON path for per-trajectory metadata")

    p = add("homoclinic", cmd_homoclinic, "locate the homoclinic bifurcation")
    p.add_argument("--A", type=_positive, default=1.0)
    p.add_argument("--bracket", type=_interval, default=(-0.9, -0.8))
    p.add_argument("--mu-tol", type=_positive, default=1e-6)
    p.add_argument("--mismatch-tol", type=_positive, default=1e-8)
    p.add_argument("--offset", type=_positive, default=1e-6)
    p.add_argument("--tol", type=_positive, default=1e-10)
    p.add_argument("--t-budget", type=_positive, default=200.0)
    p.add_argument("--out", help="JSON path (default stdout)")

    p = add("series", cmd_series, "two-sided exponential series approximation")
    p.add_argument("--A", type=_positive, default=1.0)
    p.add_argument("--mu", type=float, default=-0.836)
    p.add_argument("--xstar", type=float, default=1.426095)
    p.add_argument("--Nl", type=_count, default=40, help="terms in the T > 0 branch")
    p.add_argument("--Nu", type=_count, default=20, help="terms in the T < 0 branch")
    p.add_argument("--t-range", type=_interval, default=(-10.0, 15.0))
    p.add_argument("--samples", type=_count, default=501)
    p.add_argument("--compare", action="store_true", help="add the numerical reference and branch errors")
    p.add_argument("--out", help="JSON path for coefficients (default stdout)")
    p.add_argument("--profile", help="CSV path for the sampled profile")

    p = add("verify", cmd_verify, "residual verification of the exact-solution catalog")
    p.add_argument("case", help=f"case id or 'all' ({', '.join(CASE_IDS)})")
    p.add_argument("--draws", type=_count, default=100)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--samples", type=_count, default=200)
    p.add_argument("--threshold", type=_positive, default=1e-10)
    p.add_argument("--literal", action="store_true", help="use the literal (uncorrected) coefficient formulas")
    p.add_argument("--out", help="JSON path (default stdout)")

    p = add("hamiltonian", cmd_hamiltonian, "level-set orbits of the conservative case")
    p.add_argument("--delta", type=float, default=1.0)
    for i, lam in enumerate(FIG1_LAMBDAS):
        p.add_argument(f"--lambda{i}", type=float, default=lam)
    p.add_argument("--u-range", type=_interval, default=(-0.3, 1.5),
                   help="orbits start at W = 0 on this U grid (one energy level each)")
    p.add_argument("--levels", type=_count, default=19)
    p.add_argument("--t-end", type=_positive, default=50.0)
    p.add_argument("--tol", type=_positive, default=1e-10)
    p.add_argument("--escape", type=_positive, default=10.0)
    p.add_argument("--out", help="CSV path (default stdout)")
    p.add_argument("--json", help="JSON path for equilibria and orbit diagnostics (default stdout)")
    return parser


def _apply_config(parser, argv):
    """Re-parse with config-file values installed as defaults."""
    args = parser.parse_args(argv)
    if not getattr(args, "config", None):
        return args
    try:
        values = read_config(args.config)
    except (OSError, ValueError) as exc:
        parser.error(f"config: {exc}")
    sub = parser._subparsers._group_actions[0].choices[args.command]
    known = {a.dest: a for a in sub._actions}
    for k, v in values.items():
        if k not in known or k in ("help", "config"):
            parser.error(f"config: unknown key {k!r} for {args.command}")
        act = known[k]
        if isinstance(act, argparse._StoreTrueAction):
            v = v.lower() in ("1", "true", "yes", "on")
        sub.set_defaults(**{k: v})
    return parser.parse_args(argv)


_INTERVAL_FLAGS = ("--bracket", "--t-range", "--u-range")


def _join_intervals(argv):
    """Allow ``--bracket -0.9:-0.8`` (argparse would read the value as a flag)."""
    out, i = [], 0
    while i < len(argv):
        if argv[i] in _INTERVAL_FLAGS and i + 1 < len(argv):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv=None):
    parser = build_parser()
    argv = _join_intervals(list(sys.argv[1:] if argv is None else argv))
    args = _apply_config(parser, argv)
    try:
        return args.func(args)
    except (UsageError, InvalidParams, ConstraintViolation, FileNotFoundError) as exc:
        print(f"twsolve: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NoSignChange as exc:
        print(f"twsolve: bracketing failed: {exc}", file=sys.stderr)
        return EXIT_BRACKET
    except (IntegrationError, SectionMiss) as exc:
        print(f"twsolve: integration failed: {exc}", file=sys.stderr)
        return EXIT_INTEGRATION
    except SeriesError as exc:
        print(f"twsolve: series construction failed: {exc}", file=sys.stderr)
        return EXIT_SERIES


if __name__ == "__main__":
    sys.exit(main())
