"""Integrals of f_n = (1 + c/(n+1)) (x, 1 - x) against the integral of the limit."""

import argparse
import math

import numpy as np

from bochnerlab.bochner import DCTParams, VectorFn, dominated_convergence_run, scaled
from bochnerlab.lebesgue import PiecewiseLipschitz
from bochnerlab.spaces import IntervalSpace
from bochnerlab.vectors import RVec


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--c", type=float, default=1.0)
    ap.add_argument("--n-max", type=int, default=1 << 21)
    ap.add_argument("--estimate-limit", action="store_true",
                    help="estimate the limit pointwise instead of passing it in")
    args = ap.parse_args()

    space = IntervalSpace()
    base = VectorFn(space, lambda xs: np.stack([xs, 1.0 - xs], -1), RVec(2), math.sqrt(2.0))
    k = 1.0 + args.c
    g = PiecewiseLipschitz(space, lambda xs: k * np.linalg.norm(base(xs), axis=1), k * math.sqrt(2.0))
    p = DCTParams(n_max=args.n_max)
    rep = dominated_convergence_run(space, lambda n: scaled(1.0 + args.c / (n + 1), base), g, p,
                                    limit=None if args.estimate_limit else base)

    print(f"limit integral {rep.limit_value}  (l1 upper {rep.limit_l1_upper:.3g})")
    print(f"{'n':>5} {'diff':>12} {'c|I|/(n+1)':>12} {'l1 upper':>10}")
    norm = float(np.linalg.norm(rep.limit_value))
    for r in rep.rows:
        print(f"{r.n:>5} {r.diff:>12.6g} {args.c * norm / (r.n + 1):>12.6g} {r.l1_upper:>10.3g}")
    print("passed" if rep.passed else "FAILED", f"(eps {rep.eps})")


if __name__ == "__main__":
    main()
