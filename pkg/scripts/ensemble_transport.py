#!/usr/bin/env python3
"""Simulated beam transport against the closed transmission coefficient.

Classifies a batch of trajectories with energies drawn on (0, V0) and
compares the surpassing fraction with 1 - erf(sqrt(2)/H), reporting the
binomial error of the sample.
"""

import argparse
import math
import sys

from effpot.lowmomentum import LowMomentumModel
from effpot.physical import PhysicalParams, dimensionless
from effpot.potential import SquareBarrier
from effpot.transmission import effective_coefficients, surpass_fraction


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=float, default=1.0)
    ap.add_argument("--beta", type=float, default=0.125)
    ap.add_argument("--hbar", type=float, nargs="+", default=[2.0, 4.0, 6.0])
    ap.add_argument("--L", type=float, default=0.5)
    ap.add_argument("--V0", type=float, default=1.0)
    ap.add_argument("--n", type=int, default=200, help="trajectories per hbar")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--stratified", action="store_true",
                    help="use stratified midpoint energies instead of random draws")
    args = ap.parse_args(argv)

    barrier = SquareBarrier(v0=args.V0, l=args.L)
    print("hbar,H,t_closed,fraction,binomial_3sigma")
    for hbar in args.hbar:
        params = PhysicalParams(m=args.m, beta=args.beta, hbar=hbar)
        model = LowMomentumModel(params, barrier)
        frac = surpass_fraction(
            model, args.n, rng=None if args.stratified else args.seed,
            stratified=args.stratified,
        )
        t = effective_coefficients(model).t
        err = 3.0 * math.sqrt(t * (1.0 - t) / args.n)
        H = dimensionless(params, barrier).H
        print(f"{hbar:g},{H:.6g},{t:.6g},{frac:.6g},{err:.3g}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
