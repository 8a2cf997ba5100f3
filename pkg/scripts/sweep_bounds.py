#!/usr/bin/env python3
"""Tabulate the bound constant against the search ratio over a parameter grid (CSV on stdout)."""

import argparse
import csv
import sys
from fractions import Fraction

from localmorrey.bounds import main_bound_constant
from localmorrey.harness import SearchConfig, empirical_operator_norm, theorem_bound
from localmorrey.kernels import builtin_kernel
from localmorrey.morrey import MorreyParams
from localmorrey.numeric import fmt


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--kernels", nargs="+", default=["hardy", "hlp"])
    ap.add_argument("--qs", nargs="+", type=int, default=[2, 3])
    ap.add_argument("--rs", nargs="+", default=["3/2", "2", "3", "4"])
    ap.add_argument("--alphas", nargs="+", default=["1/4", "1/2", "1"])
    ap.add_argument("--phi", default="lebesgue")
    ap.add_argument("--search", action="store_true", help="also run the witness search (slower)")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["kernel", "q", "r", "alpha", "C_rq", "finite", "bound", "ratio", "seed"])
    search = SearchConfig(restarts=5, iters=40, random_samples=200, seed=args.seed)
    for name in args.kernels:
        spec = builtin_kernel(name)
        for q in args.qs:
            for r in map(Fraction, args.rs):
                for a in map(Fraction, args.alphas):
                    C = main_bound_constant(spec, r, a, q)
                    ratio = bound = ""
                    if C.finite:
                        P = MorreyParams.make(q, r, a, args.phi)
                        bound = fmt(theorem_bound(spec, P)["product"])
                        if args.search and spec.exact:
                            ratio = empirical_operator_norm(spec, P, search).ratio
                    w.writerow([name, q, fmt(r), fmt(a), fmt(C.value), C.finite, bound, ratio, args.seed])
    return 0


if __name__ == "__main__":
    sys.exit(main())
