"""Lower bounds on the SWAP fidelity along a CHSH grid, written as CSV."""

import argparse

import numpy as np

from bellscope.sdprelax import RelaxationFailure, swap_fidelity_bound, write_robust_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--point", default="q2")
    ap.add_argument("--eps", type=float, default=0.0)
    ap.add_argument("--lo", type=float, default=2.2)
    ap.add_argument("--hi", type=float, default=2.5)
    ap.add_argument("--n", type=int, default=4)
    ap.add_argument("--level", type=int, default=3)
    ap.add_argument("--out", default="robustness.csv")
    args = ap.parse_args()
    rows = []
    for s in np.linspace(args.lo, args.hi, args.n):
        try:
            bound = swap_fidelity_bound(args.point, float(s), args.eps, args.level)
        except RelaxationFailure:
            bound = float("nan")
        print(f"S={s:.4f}  F>={bound:.6f}")
        rows.append((float(s), args.eps, bound, "state"))
    write_robust_csv(rows, args.out)


if __name__ == "__main__":
    main()
