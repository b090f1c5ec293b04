"""Shooting mismatch m(mu) = U_unstable - U_stable on the section W = 0, U > 0.5.

The sign change locates the homoclinic bifurcation; output is CSV on stdout.
"""

import argparse

import numpy as np

from twsolve.homoclinic import shoot_mismatch
from twsolve.io import csv_text


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--A", type=float, default=1.0)
    p.add_argument("--lo", type=float, default=-0.95)
    p.add_argument("--hi", type=float, default=-0.75)
    p.add_argument("--n", type=int, default=41)
    args = p.parse_args(argv)
    mus = np.linspace(args.lo, args.hi, args.n)
    print(csv_text(["mu", "mismatch"], [(mu, shoot_mismatch(args.A, mu)) for mu in mus]), end="")


if __name__ == "__main__":
    main()
