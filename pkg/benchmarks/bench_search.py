"""Compare the compiled and pure-Python branch-and-bound kernels.

    python benchmarks/bench_search.py [--sizes 9,10,11,12] [--pairs 3] [--out bench.csv]

Each instance is solved once per kernel through ``exact_distance``; the
two kernels must agree on value, map and node count. Times are wall-clock
seconds of the whole call (local search included), best of ``--repeat``.
"""

import argparse
import csv
import sys
import time

import numpy as np

from lipdist import DiscretizationParams, FiniteMetricSpace, exact_distance, pulse_space
from lipdist._backend import KERNELS


def planar(rng, n, name):
    return FiniteMetricSpace.from_coords(name, [f"p{i}" for i in range(n)], rng.random((n, 2)))


def instances(sizes, pairs, seed):
    rng = np.random.default_rng(seed)
    for n in sizes:
        for i in range(pairs):
            yield f"planar n={n} #{i}", planar(rng, n, "X"), planar(rng, n, "Y")
    for k in (2, 3):
        params = DiscretizationParams(3, k)
        for u, v in (("010", "100"), ("011", "110"), ("101", "111")):
            X, Y = pulse_space(u, params), pulse_space(v, params)
            yield f"pulse {u}-{v} k={k} (n={X.n})", X, Y


def timed(X, Y, kernel, repeat):
    best, res = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        res = exact_distance(X, Y, kernel=kernel)
        best = min(best, time.perf_counter() - t0)
    return best, res


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="9,10,11,12")
    ap.add_argument("--pairs", type=int, default=3)
    ap.add_argument("--repeat", type=int, default=1)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default=None, help="optional CSV path")
    args = ap.parse_args(argv)
    if "cython" not in KERNELS:
        sys.exit("compiled kernel not built; run `pip install -e . --no-build-isolation` with Cython available")

    sizes = [int(s) for s in args.sizes.split(",")]
    rows = []
    print(f"{'instance':32s} {'value':>10s} {'nodes':>9s} {'cython s':>9s} {'python s':>9s} {'speedup':>8s}")
    for label, X, Y in instances(sizes, args.pairs, args.seed):
        tc, rc = timed(X, Y, "cython", args.repeat)
        tp, rp = timed(X, Y, "python", args.repeat)
        same = (rc.value, rc.best_map.perm, rc.nodes_explored) == (rp.value, rp.best_map.perm, rp.nodes_explored)
        if not same:
            sys.exit(f"kernels disagree on {label}")
        rows.append({"instance": label, "n": X.n, "value": rc.value, "nodes": rc.nodes_explored,
                     "cython_s": tc, "python_s": tp, "speedup": tp / tc})
        print(f"{label:32s} {rc.value:10.6f} {rc.nodes_explored:9d} {tc:9.4f} {tp:9.4f} {tp / tc:8.1f}")
    if args.out:
        with open(args.out, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(rows[0]))
            w.writeheader()
            w.writerows(rows)


if __name__ == "__main__":
    main()
