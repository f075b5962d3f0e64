"""Measurements on decomposed graphs: distances, expansion, mixing, cycles.

Distance observables run on CSR adjacency through the kernel backend; the
exact diameter uses eccentricity pruning (double sweep + level processing),
which returns the true diameter while doing far fewer BFS runs than the
all-source scan it replaces.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np
import scipy.sparse as sp

from . import _core
from .decompose import CoreDecomposition
from .multigraph import Multigraph

__all__ = [
    "ObservableRecord",
    "cycle_census",
    "diameter",
    "isoperimetric_number",
    "kernel_max_distance",
    "max_two_path",
    "measure",
    "mixing_time_exact",
    "typical_kernel_distance",
]

ISO_MAX_VERTICES = 22
MIXING_MAX_VERTICES = 5000
MIXING_EXHAUSTIVE_STARTS = 500


@dataclass
class ObservableRecord:
    """One replica's measurements; field order fixes the CSV column order."""

    component_size: int
    core_size: int
    stripped_cycle_vertex_count: int
    kernel_vertices: int
    kernel_edges: int
    max_two_path: int
    diameter: int | None = None
    typical_kernel_distance_mean: float | None = None
    kernel_max_distance: int | None = None
    isoperimetric_number: float | None = None
    mixing_time: int | None = None
    bush_size_max: int = 0

    @classmethod
    def field_names(cls):
        return tuple(f.name for f in fields(cls))

    def to_dict(self) -> dict:
        return {name: getattr(self, name) for name in self.field_names()}


def max_two_path(d: CoreDecomposition) -> int:
    """Longest 2-path contracted into a kernel edge."""
    if d.kernel.m == 0:
        raise ValueError("kernel has no edge")
    return int(d.path_lengths.max())


def _require_connected(g: Multigraph) -> None:
    if g.n == 0:
        raise ValueError("empty graph")
    indptr, nbr = g.adjacency()
    dist = _core.bfs_distances(indptr, nbr, 0, g.n)
    if (dist < 0).any():
        raise ValueError("input graph is disconnected")


def diameter(g: Multigraph, mode: str = "exact") -> int:
    """Graph diameter; ``mode="fast"`` returns the double-sweep lower bound.

    Exact mode prunes with eccentricity levels: root a BFS at the midpoint of
    a double-sweep path, then scan level sets outward-in, stopping once
    2 * level can no longer beat the best eccentricity seen.
    """
    _require_connected(g)
    if g.n == 1:
        return 0
    indptr, nbr = g.adjacency()
    n = g.n
    dist = np.empty(n, dtype=np.int32)
    parent = np.empty(n, dtype=np.int64)

    deg = np.diff(indptr)
    start = int(np.argmax(deg))
    _, a = _core.bfs_fill(indptr, nbr, start, dist)
    ecc_a, b = _core.bfs_fill(indptr, nbr, a, dist, parent)
    lower = ecc_a
    if mode == "fast":
        ecc_b = _core.eccentricity(indptr, nbr, b, n)
        return int(max(lower, ecc_b))
    if mode != "exact":
        raise ValueError(f"unknown diameter mode {mode!r}")

    # midpoint of the a-b shortest path
    path = [b]
    while path[-1] != a:
        path.append(int(parent[path[-1]]))
    mid = path[len(path) // 2]

    ecc_mid, _ = _core.bfs_fill(indptr, nbr, mid, dist)
    levels = dist.copy()
    lower = max(lower, ecc_mid)
    order = np.argsort(levels, kind="stable")
    scratch = np.empty(n, dtype=np.int32)
    i = n - 1
    level = int(levels[order[i]])
    while 2 * level > lower and i >= 0:
        v = int(order[i])
        level = int(levels[v])
        if 2 * level <= lower:
            break
        ecc = _core.eccentricity(indptr, nbr, v, n, scratch)
        if ecc > lower:
            lower = ecc
        i -= 1
    return int(lower)


def typical_kernel_distance(d: CoreDecomposition, rng: np.random.Generator,
                            pairs: int = 256):
    """Distances between uniform kernel-vertex pairs, measured in the 2-core.

    Returns (mean, quantile dict, sample array).
    """
    k = len(d.kernel_vertex_map)
    if k < 2:
        raise ValueError("need at least two kernel vertices")
    core = d.stripped_core
    indptr, nbr = core.adjacency()
    us = rng.integers(k, size=pairs)
    vs = rng.integers(k - 1, size=pairs)
    vs[vs >= us] += 1  # distinct uniform pairs
    dist = np.empty(core.n, dtype=np.int32)
    out = np.empty(pairs, dtype=np.int64)
    cache: dict[int, np.ndarray] = {}
    for t in range(pairs):
        u = int(d.kernel_vertex_map[us[t]])
        if u not in cache:
            _core.bfs_fill(indptr, nbr, u, dist)
            cache[u] = dist.copy()
        out[t] = cache[u][d.kernel_vertex_map[vs[t]]]
    if (out < 0).any():
        raise ValueError("kernel vertices in different components")
    qs = {q: float(np.quantile(out, q / 100.0)) for q in (10, 25, 50, 75, 90)}
    return float(out.mean()), qs, out


def kernel_max_distance(d: CoreDecomposition) -> int:
    """Max 2-core distance over kernel-vertex pairs (exact, BFS per vertex)."""
    k = len(d.kernel_vertex_map)
    if k < 2:
        raise ValueError("need at least two kernel vertices")
    core = d.stripped_core
    indptr, nbr = core.adjacency()
    dist = np.empty(core.n, dtype=np.int32)
    best = 0
    for kv in d.kernel_vertex_map:
        _core.bfs_fill(indptr, nbr, int(kv), dist)
        dk = dist[d.kernel_vertex_map]
        if (dk < 0).any():
            raise ValueError("kernel vertices in different components")
        best = max(best, int(dk.max()))
    return best


def isoperimetric_number(g: Multigraph) -> float:
    """min e(S, S^c) / d(S) over subsets with volume d(S) <= |E|, exact.

    Loops add 2 to the volume and never to the boundary.  Exhaustive over
    all 2^n vertex subsets, so n is capped at 22.
    """
    n = g.n
    if n > ISO_MAX_VERTICES:
        raise ValueError(f"exact isoperimetric number capped at {ISO_MAX_VERTICES} vertices")
    if n == 0:
        raise ValueError("empty graph")
    deg = g.degrees().astype(np.int64)
    masks = np.arange(1, 1 << n, dtype=np.int64)
    vol = np.zeros(len(masks), dtype=np.int64)
    for v in range(n):
        vol += np.where((masks >> v) & 1, deg[v], 0)
    cut = np.zeros(len(masks), dtype=np.int64)
    for u, v in zip(g.eu.tolist(), g.ev.tolist()):
        if u == v:
            continue
        cut += ((masks >> u) ^ (masks >> v)) & 1
    ok = (vol <= g.m) & (vol > 0)
    if not ok.any():
        raise ValueError("no subset satisfies the volume constraint")
    return float((cut[ok] / vol[ok]).min())


def _lazy_walk_matrix(g: Multigraph):
    """Lazy-walk transition matrix (CSR) and stationary distribution.

    Transition mass is proportional to edge multiplicity; an ordinary loop
    holds 2/deg at its vertex (a special loop 1/deg), keeping the stationary
    law proportional to degree.
    """
    deg = g.degrees().astype(np.float64)
    if (deg == 0).any():
        raise ValueError("isolated vertex has no walk")
    mask = g.eu != g.ev
    u, v = g.eu[mask], g.ev[mask]
    rows = np.concatenate([u, v, g.eu[~mask]])
    cols = np.concatenate([v, u, g.ev[~mask]])
    loop_w = np.full(int((~mask).sum()), 2.0)
    if g.special is not None:
        loop_w[g.special[~mask]] = 1.0
    data = np.concatenate([np.ones(mask.sum()), np.ones(mask.sum()), loop_w])
    w = sp.csr_matrix((data / deg[rows], (rows, cols)), shape=(g.n, g.n))
    lazy = sp.identity(g.n, format="csr") * 0.5 + w * 0.5
    pi = deg / deg.sum()
    return lazy, pi


def mixing_time_exact(g: Multigraph, tv_threshold: float = 0.25,
                      rng: np.random.Generator | None = None,
                      max_steps: int = 200_000) -> int:
    """Smallest t with worst-start TV distance to stationarity <= threshold.

    Exhaustive over starts up to 500 vertices; beyond that, the worst-start
    subsample is the double-sweep extreme vertex plus 16 random starts and
    the result is a lower-bound estimate.
    """
    _require_connected(g)
    if g.n > MIXING_MAX_VERTICES:
        raise ValueError(f"exact mixing time capped at {MIXING_MAX_VERTICES} vertices")
    lazy, pi = _lazy_walk_matrix(g)
    if g.n <= MIXING_EXHAUSTIVE_STARTS:
        starts = np.arange(g.n)
    else:
        indptr, nbr = g.adjacency()
        dist = np.empty(g.n, dtype=np.int32)
        _, far = _core.bfs_fill(indptr, nbr, 0, dist)
        _, far2 = _core.bfs_fill(indptr, nbr, far, dist)
        if rng is None:
            rng = np.random.default_rng(0)
        starts = np.unique(
            np.concatenate([[far, far2], rng.integers(g.n, size=16)])
        )
    lazy_t = lazy.T.tocsr()
    x = np.zeros((g.n, len(starts)))
    x[starts, np.arange(len(starts))] = 1.0
    t = 0
    while t <= max_steps:
        tv = 0.5 * np.abs(x - pi[:, None]).sum(axis=0).max()
        if tv <= tv_threshold:
            return t
        x = lazy_t @ x
        t += 1
    raise RuntimeError(f"walk did not mix within {max_steps} steps")


def cycle_census(d: CoreDecomposition):
    """(number of stripped disjoint cycles, vertices contained in them)."""
    return len(d.stripped_cycle_lengths), int(sum(d.stripped_cycle_lengths))


def measure(d: CoreDecomposition, metrics, rng: np.random.Generator,
            distance_pairs: int = 256) -> ObservableRecord:
    """Compute the requested metrics for one decomposed component.

    Structural counts are always filled; the expensive distance/mixing
    observables only when named in ``metrics``.
    """
    rec = ObservableRecord(
        component_size=d.component.n,
        core_size=d.core_size,
        stripped_cycle_vertex_count=d.stripped_cycle_vertex_count,
        kernel_vertices=d.kernel.n,
        kernel_edges=d.kernel.m,
        max_two_path=int(d.path_lengths.max()) if d.kernel.m else 0,
        bush_size_max=int(d.bush_sizes().max()) if d.core_size else 0,
    )
    metrics = set(metrics)
    if "diameter" in metrics:
        rec.diameter = diameter(d.component)
        # any 2-path of length L forces a core vertex at distance >= ceil(L/2)
        assert rec.diameter >= -(-rec.max_two_path // 2)
    if "typical_kernel_distance_mean" in metrics and d.kernel.n >= 2:
        rec.typical_kernel_distance_mean = typical_kernel_distance(
            d, rng, pairs=distance_pairs
        )[0]
    if "kernel_max_distance" in metrics and d.kernel.n >= 2:
        rec.kernel_max_distance = kernel_max_distance(d)
    if "isoperimetric_number" in metrics and 0 < d.kernel.n <= ISO_MAX_VERTICES:
        try:
            rec.isoperimetric_number = isoperimetric_number(d.kernel)
        except ValueError:
            rec.isoperimetric_number = None
    if "mixing_time" in metrics and d.component.n <= MIXING_MAX_VERTICES:
        rec.mixing_time = mixing_time_exact(d.component, rng=rng)
    return rec
