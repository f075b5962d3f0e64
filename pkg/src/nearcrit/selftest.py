"""Exhaustive-oracle property suites behind the ``selftest`` subcommand.

Each suite checks a fast implementation against an independent brute-force
oracle: peeling against the maximum min-degree-2 subset, BFS diameter
against Floyd-Warshall, the half-edge matcher against exact enumeration of
perfect matchings, and the KS test against its null distribution.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .analytic import ModelParams
from .decompose import contract_to_kernel, strip_disjoint_cycles, two_core
from .harness import ks_two_sample
from .models import sample_gnp
from .multigraph import (
    Multigraph,
    bfs_distances,
    configuration_match,
    largest_component,
    subdivide_edges,
)
from .observables import diameter

__all__ = [
    "SuiteResult",
    "check_config_match_33",
    "check_diameter_oracle",
    "check_kernel_reexpansion",
    "check_ks_uniformity",
    "check_two_core_oracle",
    "random_multigraph",
    "run_all",
]


@dataclass
class SuiteResult:
    name: str
    ok: bool
    detail: str
    seconds: float


def random_multigraph(rng: np.random.Generator, n_max: int = 12,
                      mean_degree: float = 2.2, loops: bool = True) -> Multigraph:
    """Small random multigraph for oracle sweeps: G(n, c/n) plus occasional
    duplicated edges and loops."""
    n = int(rng.integers(1, n_max + 1))
    p = min(0.9, mean_degree / n)
    eu, ev = [], []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                eu.append(i)
                ev.append(j)
                if rng.random() < 0.1:  # multi-edge
                    eu.append(i)
                    ev.append(j)
    if loops and n > 0:
        for _ in range(int(rng.integers(0, 2))):
            v = int(rng.integers(n))
            eu.append(v)
            ev.append(v)
    return Multigraph(n, (np.array(eu, dtype=np.int64), np.array(ev, dtype=np.int64)))


def _two_core_subset_oracle(g: Multigraph) -> np.ndarray:
    """Union of all vertex subsets inducing min degree >= 2 (n <= ~14)."""
    n = g.n
    best = 0
    for mask in range(1, 1 << n):
        deg = [0] * n
        for u, v, s in zip(g.eu.tolist(), g.ev.tolist(),
                           (g.special.tolist() if g.special is not None else [False] * g.m)):
            if (mask >> u) & 1 and (mask >> v) & 1:
                if u == v:
                    deg[u] += 1 if s else 2
                else:
                    deg[u] += 1
                    deg[v] += 1
        ok = all(deg[v] >= 2 for v in range(n) if (mask >> v) & 1)
        if ok:
            best |= mask
    return np.array([v for v in range(n) if (best >> v) & 1], dtype=np.int64)


def check_two_core_oracle(graphs: int = 200, seed: int = 0) -> SuiteResult:
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    for i in range(graphs):
        g = random_multigraph(rng, n_max=12)
        got = two_core(g)
        want = _two_core_subset_oracle(g)
        if not np.array_equal(got, want):
            return SuiteResult(
                "two_core_subset_oracle", False,
                f"mismatch on graph {i}: got {got.tolist()}, want {want.tolist()}",
                time.perf_counter() - t0,
            )
    return SuiteResult("two_core_subset_oracle", True, f"{graphs} graphs",
                       time.perf_counter() - t0)


def _floyd_warshall(g: Multigraph) -> np.ndarray:
    n = g.n
    dist = np.full((n, n), np.inf)
    np.fill_diagonal(dist, 0.0)
    for u, v in zip(g.eu.tolist(), g.ev.tolist()):
        if u != v:
            dist[u, v] = dist[v, u] = 1.0
    for k in range(n):
        np.minimum(dist, dist[:, k, None] + dist[None, k, :], out=dist)
    return dist


def check_diameter_oracle(graphs: int = 200, seed: int = 1) -> SuiteResult:
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    done = 0
    while done < graphs:
        n = int(rng.integers(2, 101))
        p = min(0.95, float(rng.uniform(1.2, 3.0)) / n)
        g = sample_gnp(ModelParams.from_p(n, p), rng)
        comp = largest_component(g)
        if len(comp) < 2:
            continue
        sub, _ = g.induced(comp)
        fw = _floyd_warshall(sub)
        want = int(fw.max())
        got = diameter(sub, mode="exact")
        if got != want:
            return SuiteResult(
                "diameter_floyd_warshall", False,
                f"mismatch on graph {done}: got {got}, want {want}",
                time.perf_counter() - t0,
            )
        # spot-check one BFS row against the oracle as well
        src = int(rng.integers(sub.n))
        if not np.array_equal(bfs_distances(sub, src), fw[src]):
            return SuiteResult(
                "diameter_floyd_warshall", False,
                f"bfs row mismatch on graph {done}", time.perf_counter() - t0,
            )
        done += 1
    return SuiteResult("diameter_floyd_warshall", True, f"{graphs} graphs",
                       time.perf_counter() - t0)


def check_config_match_33(samples: int = 150_000, seed: int = 2,
                          tol: float = 0.01) -> SuiteResult:
    """Degrees [3, 3]: P(triple edge) = 6/15, P(loop+loop+edge) = 9/15."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    degrees = np.array([3, 3], dtype=np.int64)
    triple = 0
    for _ in range(samples):
        g = configuration_match(degrees, rng)
        if (g.eu != g.ev).all():
            triple += 1
    p_triple = triple / samples
    ok = abs(p_triple - 0.4) <= tol
    return SuiteResult(
        "configuration_match_enumeration", ok,
        f"P(triple edge) = {p_triple:.4f} (want 0.4000 +- {tol})",
        time.perf_counter() - t0,
    )


def check_kernel_reexpansion(cores: int = 100, seed: int = 3) -> SuiteResult:
    """Contract then re-expand random stripped cores; compare degree sequence
    and per-kernel-vertex BFS distance multisets."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    done = 0
    while done < cores:
        n = int(rng.integers(20, 301))
        g = sample_gnp(ModelParams.from_p(n, float(rng.uniform(1.1, 1.6)) / n), rng)
        comp = largest_component(g)
        if len(comp) < 4:
            continue
        sub, _ = g.induced(comp)
        core_v = two_core(sub)
        if len(core_v) < 4:
            continue
        core, _ = sub.induced(core_v)
        stripped, _, _ = strip_disjoint_cycles(core)
        if stripped.n == 0:
            continue
        kernel, lengths, kmap = contract_to_kernel(stripped)
        redone = subdivide_edges(kernel, lengths)
        if redone.n != stripped.n or redone.m != stripped.m:
            return SuiteResult("kernel_reexpansion", False,
                               f"size mismatch on core {done}",
                               time.perf_counter() - t0)
        if sorted(redone.degrees().tolist()) != sorted(stripped.degrees().tolist()):
            return SuiteResult("kernel_reexpansion", False,
                               f"degree sequence mismatch on core {done}",
                               time.perf_counter() - t0)
        # kernel vertex k is vertex k in the re-expansion and kmap[k] in the
        # original; their BFS distance multisets must agree
        for k in range(kernel.n):
            a = np.sort(bfs_distances(redone, k))
            b = np.sort(bfs_distances(stripped, int(kmap[k])))
            if not np.array_equal(a, b):
                return SuiteResult("kernel_reexpansion", False,
                                   f"distance multiset mismatch on core {done}",
                                   time.perf_counter() - t0)
        done += 1
    return SuiteResult("kernel_reexpansion", True, f"{cores} cores",
                       time.perf_counter() - t0)


def check_ks_uniformity(trials: int = 1000, seed: int = 4) -> SuiteResult:
    """Null p-values should be roughly uniform: fraction below 0.05 in
    [0.02, 0.09] at 1000 trials."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    hits = 0
    for _ in range(trials):
        xs = rng.random(60)
        ys = rng.random(60)
        if ks_two_sample(xs, ys).p < 0.05:
            hits += 1
    frac = hits / trials
    ok = 0.02 <= frac <= 0.09
    return SuiteResult("ks_null_uniformity", ok,
                       f"fraction below 0.05 = {frac:.3f} (want [0.02, 0.09])",
                       time.perf_counter() - t0)


def run_all(quick: bool = False) -> list[SuiteResult]:
    scale = 0.1 if quick else 1.0
    suites = [
        lambda: check_two_core_oracle(graphs=max(20, int(200 * scale))),
        lambda: check_diameter_oracle(graphs=max(20, int(200 * scale))),
        lambda: check_config_match_33(samples=max(20_000, int(150_000 * scale)),
                                      tol=0.01 if not quick else 0.02),
        lambda: check_kernel_reexpansion(cores=max(10, int(100 * scale))),
        lambda: check_ks_uniformity(trials=max(200, int(1000 * scale))),
    ]
    names = ["two_core_subset_oracle", "diameter_floyd_warshall",
             "configuration_match_enumeration", "kernel_reexpansion",
             "ks_null_uniformity"]
    out = []
    for name, suite in zip(names, suites):
        t0 = time.perf_counter()
        try:
            out.append(suite())
        except Exception as exc:  # noqa: BLE001 - a crash is a failed suite
            out.append(SuiteResult(name, False, f"crashed: {exc!r}",
                                   time.perf_counter() - t0))
    return out
