#!/usr/bin/env python3
"""Grid-convergence study: leapfrog reference solver against the exact
representation formula on the linear problem, across kernel parameters.
"""

import argparse
import sys

import numpy as np

from adswave.linear1d import CauchyData1D, evaluate_exact, fd_reference_solve
from adswave.params import ModelParams, derive

CASES = [
    ("nu=0.0", ModelParams(c=1, H=1, b=0.0, m2=0.0, R=1)),
    ("nu=0.5", ModelParams(c=1, H=1, b=1.0, m2=0.0, R=1)),
    ("nu=1.3", ModelParams(c=1, H=1, b=3.0, m2=0.56, R=1)),
]


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--t-end", type=float, default=1.0)
    ap.add_argument("--dx", type=float, nargs="+",
                    default=[0.04, 0.02, 0.01, 0.005])
    args = ap.parse_args()
    data = CauchyData1D.default_bumps(R=1.0)
    for label, mp in CASES:
        dp = derive(mp)
        xs_chk = np.linspace(-2.5, 2.5, 11)
        exact = np.array([evaluate_exact(args.t_end, float(x), data, mp, dp)[0]
                          for x in xs_chk])
        print(f"{label}:")
        prev = None
        for dx in args.dx:
            grid = fd_reference_solve(data, mp, t_end=args.t_end, dx=dx)
            approx = np.interp(xs_chk, grid.xs, grid.frame_at(args.t_end))
            err = float(np.max(np.abs(approx - exact)))
            rate = "" if prev is None else f"  ratio={prev / err:.2f}"
            print(f"  dx={dx:<7g} max err={err:.3e}{rate}")
            prev = err
    return 0


if __name__ == "__main__":
    sys.exit(main())
