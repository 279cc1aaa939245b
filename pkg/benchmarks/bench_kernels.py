"""Time the numba kernels against their numpy twins.

    python3 benchmarks/bench_kernels.py [--repeat N]

Prints one row per (kernel, field) with the best-of-N wall time of each
backend and the speedup.  Compilation is excluded by a warm-up call.
"""

import argparse
import time

import numpy as np

from girth8 import kernels
from girth8.census import spec_from_text
from girth8.field import make_field
from girth8.graph import adjacency_csr


def best_of(fn, args, repeat):
    fn(*args)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def cases():
    for p, k in [(7, 1), (3, 2), (11, 1), (13, 1), (2, 6), (3, 4), (11, 2)]:
        F = make_field(p, k)
        G = spec_from_text(F, "x*y", "x^2*y")
        F2, F3 = G.tables
        sub, add = F.sub_table, F.add_table
        yield "bfs_cycle", F, (F2, F3, sub, 6)
        if F.q <= 13:
            yield "delta3", F, (F2, F3, sub, add)
        if F.q <= 9:
            yield "delta4", F, (F2, F3, sub, add)
            indptr, indices = adjacency_csr(G)
            yield "full_bfs_girth", F, (indptr, indices, 8)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    print(f"{'kernel':<16}{'field':>8}{'numba s':>12}{'numpy s':>12}{'speedup':>10}")
    for name, F, targs in cases():
        nb = getattr(kernels, f"{name}_nb")
        npf = getattr(kernels, f"{name}_np")
        assert np.array_equal(np.asarray(nb(*targs)), np.asarray(npf(*targs)))
        t_nb = best_of(nb, targs, args.repeat)
        t_np = best_of(npf, targs, args.repeat)
        print(f"{name:<16}{'F_' + F.name:>8}{t_nb:>12.4f}{t_np:>12.4f}{t_np / t_nb:>9.1f}x")


if __name__ == "__main__":
    main()
