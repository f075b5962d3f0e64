"""Benchmark the compiled kernels against the pure-python fallbacks.

Usage: python benchmarks/bench_kernels.py [--n 500000]
Times the hot kernels (peeling, components, BFS eccentricity, COLA drain)
on a supercritical G(n, (1+eps)/n) instance and a Poisson cell, with both
backends, and prints a speedup table.
"""

import argparse
import time

import numpy as np

import nearcrit._core as core
from nearcrit._core import pure
from nearcrit.analytic import ModelParams
from nearcrit.cola import generate_cell, run_cola
from nearcrit.models import sample_gnp
from nearcrit.multigraph import largest_component

try:
    from nearcrit._core import _speedups as compiled
except ImportError:
    compiled = None


def timeit(fn, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=500_000)
    ap.add_argument("--eps", type=float, default=0.05)
    args = ap.parse_args()

    params = ModelParams.from_eps(args.n, args.eps)
    rng = np.random.default_rng(0)
    g = sample_gnp(params, rng)
    indptr, nbr, eid = g.incidence()
    adj_indptr, adj_nbr = g.adjacency()
    deg = g.degrees()
    comp = largest_component(g)
    sub, _ = g.induced(comp)
    s_indptr, s_nbr = sub.adjacency()

    cell = generate_cell(args.n // 5, 1.1, np.random.default_rng(1))

    def cola_with(impl):
        def run():
            core.cola_drain = impl.cola_drain
            try:
                run_cola(cell, stop_at_lambda_c=True,
                         rng=np.random.default_rng(2))
            finally:
                core.cola_drain = (compiled or pure).cola_drain
        return run

    rows = []
    benches = [
        ("peel_two_core", lambda impl: lambda: impl.peel_two_core(
            indptr, nbr, eid, deg, g.m)),
        ("connected_labels", lambda impl: lambda: impl.connected_labels(
            adj_indptr, adj_nbr, g.n)),
        ("eccentricity", lambda impl: lambda: impl.eccentricity(
            s_indptr, s_nbr, 0, sub.n)),
        ("cola_to_lambda_c", lambda impl: cola_with(impl)),
    ]
    print(f"n={args.n}, eps={args.eps}, m={g.m}, giant={sub.n}, "
          f"clones={cell.total_clones}")
    print(f"{'kernel':<20} {'pure':>10} {'compiled':>10} {'speedup':>9}")
    for name, make in benches:
        t_pure = timeit(make(pure))
        if compiled is None:
            print(f"{name:<20} {t_pure:>9.3f}s {'-':>10} {'-':>9}")
            continue
        t_comp = timeit(make(compiled))
        print(f"{name:<20} {t_pure:>9.3f}s {t_comp:>9.3f}s {t_pure / t_comp:>8.1f}x")


if __name__ == "__main__":
    main()
