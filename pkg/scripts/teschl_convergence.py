"""L1 error of the approximating simple functions for f(x) = (x, 1 - x) on [0, 1)."""

import argparse
import math

import numpy as np

from bochnerlab.bochner import VectorFn, bif_from_separable, bint_detail
from bochnerlab.separability import dense_seq, dyadic_seq
from bochnerlab.spaces import IntervalSpace
from bochnerlab.vectors import RVec


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-max", type=int, default=1 << 20)
    ap.add_argument("--resolution", type=int, default=12)
    ap.add_argument("--seq", choices=("cantor", "szudzik", "dyadic"), default="cantor")
    args = ap.parse_args()

    space = IntervalSpace()
    f = VectorFn(space, lambda xs: np.stack([xs, 1.0 - xs], -1), RVec(2), math.sqrt(2.0))
    u = dyadic_seq(RVec(2)) if args.seq == "dyadic" else dense_seq(RVec(2), True, args.seq)
    w = bif_from_separable(space, f, u, args.n_max, args.resolution)
    engine = w.meta["engine"]

    print(f"{'n':>9} {'l1':>12} {'bound':>10} {'integral':>26}")
    for r in w.l1:
        v = engine.integral(r.n)
        print(f"{r.n:>9} {r.value:>12.6g} {r.bound:>10.2g}   ({v[0]:.6f}, {v[1]:.6f})")
    b = bint_detail(w, 1e-3, 100)
    err = np.abs(b.value.coords - 0.5).max()
    print(f"bint = {b.value.coords.tolist()}  n* = {b.n_star}  l1 upper = {b.l1_upper:.3g}  |err| = {err:.2g}")


if __name__ == "__main__":
    main()
