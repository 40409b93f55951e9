#!/usr/bin/env python3
"""Measure the remainder order of the momentum expansion.

Sweeps p at a few fixed positions, subtracts the quadratic-in-p model from
the full effective potential, and fits the log-log slope of the remainder.
A slope near 4 confirms the expansion drops only O(p^4) terms.
"""

import argparse
import math
import sys

import numpy as np

from effpot.kernel import effective_potential
from effpot.lowmomentum import LowMomentumModel, inverse_mass, smoothed_potential
from effpot.physical import PhysicalParams
from effpot.potential import SquareBarrier


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=float, default=1.0)
    ap.add_argument("--beta", type=float, default=0.125)
    ap.add_argument("--hbar", type=float, default=3.0)
    ap.add_argument("--L", type=float, default=0.5)
    ap.add_argument("--V0", type=float, default=1.0)
    ap.add_argument("--pmin", type=float, default=0.05,
                    help="sweep start in units of sqrt(m/beta)")
    ap.add_argument("--pmax", type=float, default=0.4,
                    help="sweep end in units of sqrt(m/beta)")
    ap.add_argument("--n", type=int, default=12, help="sweep points")
    ap.add_argument("--q", type=float, nargs="+", default=None,
                    help="positions to probe (default: 0, L, 2L)")
    args = ap.parse_args(argv)

    params = PhysicalParams(m=args.m, beta=args.beta, hbar=args.hbar)
    barrier = SquareBarrier(v0=args.V0, l=args.L)
    model = LowMomentumModel(params, barrier)
    qs = args.q if args.q is not None else [0.0, args.L, 2.0 * args.L]
    ps = np.linspace(args.pmin, args.pmax, args.n) * math.sqrt(args.m / args.beta)

    print(f"# m={args.m:g} beta={args.beta:g} hbar={args.hbar:g} L={args.L:g} V0={args.V0:g}")
    print("q,slope,remainder_at_pmax")
    for q in qs:
        v0 = smoothed_potential(model, q)
        dm = inverse_mass(model, q) - 1.0 / args.m
        deltas = np.array([
            abs(effective_potential(params, barrier, q, float(p)) - (v0 + 0.5 * p * p * dm))
            for p in ps
        ])
        if np.any(deltas <= 0.0):
            print(f"{q:.6g},nan,{deltas[-1]:.6g}")
            continue
        slope = float(np.polyfit(np.log(ps), np.log(deltas), 1)[0])
        print(f"{q:.6g},{slope:.4f},{deltas[-1]:.6g}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
