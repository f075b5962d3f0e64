"""Samplers for the random-graph models, including both contiguous builds.

The two staged builds (``c1_general`` and ``c1_simple``) assemble kernel,
2-core and attached trees explicitly and therefore return their own
decomposition next to the graph, so round-trip tests need not re-derive it.
"""

from __future__ import annotations

import enum
import math
import warnings

import numpy as np

from .analytic import ModelParams, sample_pgw_forest
from .decompose import Bushes, CoreDecomposition
from .multigraph import Multigraph, configuration_match, subdivide_edges

__all__ = [
    "ModelKind",
    "RejectionError",
    "sample",
    "sample_c1_general",
    "sample_c1_simple",
    "sample_gnp",
    "sample_poisson_cloning",
    "sample_poisson_configuration",
    "sample_poisson_geometric",
]

_LAMBDA_REDRAWS = 100
_PARITY_REDRAWS = 10_000


class RejectionError(RuntimeError):
    """A rejection-sampling loop exceeded its redraw cap (pathological params)."""


class ModelKind(str, enum.Enum):
    GNP = "gnp"
    POISSON_CLONING = "poisson_cloning"
    POISSON_CONFIGURATION = "poisson_configuration"
    POISSON_GEOMETRIC = "poisson_geometric"
    C1_GENERAL = "c1_general"
    C1_SIMPLE = "c1_simple"


def _bernoulli_indices(n_trials: int, p: float, rng: np.random.Generator) -> np.ndarray:
    """Sorted indices of successes among n_trials independent Bernoulli(p),
    generated by geometric skipping in O(successes) expected time."""
    if n_trials == 0 or p == 0.0:
        return np.empty(0, dtype=np.int64)
    out = []
    consumed = 0
    while consumed < n_trials:
        remaining = n_trials - consumed
        block = max(256, int(remaining * p * 1.1) + 32)
        gaps = rng.geometric(p, size=block).astype(np.int64)
        hits = consumed + np.cumsum(gaps) - 1
        inside = hits < n_trials
        out.append(hits[inside])
        if not inside.all():
            break
        consumed = int(hits[-1]) + 1
    return np.concatenate(out) if out else np.empty(0, dtype=np.int64)


def _linear_to_pair(k: np.ndarray, n: int):
    """Invert the row-major enumeration of pairs (i, j), i < j < n."""
    b = 2.0 * n - 1.0
    i = ((b - np.sqrt(b * b - 8.0 * k)) / 2.0).astype(np.int64)
    i = np.clip(i, 0, n - 2)

    def row_start(i_):
        return i_ * (2 * n - i_ - 1) // 2

    # float sqrt can be off by one near row boundaries
    while True:
        over = row_start(i) > k
        if not over.any():
            break
        i[over] -= 1
    while True:
        under = row_start(i + 1) <= k
        if not under.any():
            break
        i[under] += 1
    j = k - row_start(i) + i + 1
    return i, j


def sample_gnp(params: ModelParams, rng: np.random.Generator) -> Multigraph:
    """Erdos-Renyi G(n, p): each pair present independently with probability p."""
    n, p = params.n, params.p
    if not 0.0 <= p < 1.0:
        raise ValueError(f"p must lie in [0, 1), got {p}")
    idx = _bernoulli_indices(n * (n - 1) // 2, p, rng)
    eu, ev = _linear_to_pair(idx, n)
    return Multigraph.from_arrays(n, eu, ev)


def _degree_biased_pick(degs: np.ndarray, rng: np.random.Generator) -> int:
    """Index picked with probability proportional to its degree."""
    cum = np.cumsum(degs)
    t = int(rng.integers(cum[-1]))
    return int(np.searchsorted(cum, t, side="right"))


def sample_poisson_cloning(params: ModelParams, rng: np.random.Generator) -> Multigraph:
    """Poisson cloning: i.i.d. Po(lambda) clones per vertex, uniformly matched.

    An odd clone total is resolved by turning one uniform clone into a
    special self-loop of degree 1 before matching.
    """
    n = params.n
    d = rng.poisson(params.lam, n).astype(np.int64)
    special = None
    if int(d.sum()) % 2:
        v = _degree_biased_pick(d, rng)
        d[v] -= 1
        special = v
    g = configuration_match(d, rng)
    if special is None:
        return g
    eu = np.concatenate([g.eu, [special]])
    ev = np.concatenate([g.ev, [special]])
    sp = np.zeros(len(eu), dtype=bool)
    sp[-1] = True
    return Multigraph.from_arrays(n, eu, ev, sp)


def _draw_capacity(params: ModelParams, rng: np.random.Generator) -> float:
    """The Normal(lambda - mu, 1/(eps n)) capacity, redrawn while <= 0."""
    sigma = math.sqrt(1.0 / (params.eps * params.n))
    for _ in range(_LAMBDA_REDRAWS):
        cap = rng.normal(params.lam - params.mu, sigma)
        if cap > 0.0:
            return cap
    raise RejectionError("capacity stayed <= 0 after 100 redraws")


def _parity_loop_fix(degs: np.ndarray, rng: np.random.Generator):
    """Odd degree sum: a degree-biased vertex keeps k-1 half-edges plus an
    ordinary self-loop (counted as degree 2).  Returns the loop endpoint."""
    u = _degree_biased_pick(degs, rng)
    degs[u] -= 1
    return u


def sample_poisson_configuration(params: ModelParams, rng: np.random.Generator) -> Multigraph:
    """Uniform graph on the Po(capacity) degrees restricted to >= 2."""
    params.require_supercritical()
    if params.eps3n < 1:
        warnings.warn(
            f"eps^3 n = {params.eps3n:.3g} < 1: outside the recommended regime",
            stacklevel=2,
        )
    cap = _draw_capacity(params, rng)
    d = rng.poisson(cap, params.n)
    degs = d[d >= 2].astype(np.int64)
    loop_at = None
    if int(degs.sum()) % 2:
        loop_at = _parity_loop_fix(degs, rng)
    g = configuration_match(degs, rng)
    if loop_at is None:
        return g
    eu = np.concatenate([g.eu, [loop_at]])
    ev = np.concatenate([g.ev, [loop_at]])
    return Multigraph.from_arrays(len(degs), eu, ev)


def _kernel_from_degrees(degs: np.ndarray, rng: np.random.Generator) -> Multigraph:
    """Kernel multigraph for degrees >= 3 with the odd-sum loop fix."""
    loop_at = None
    if int(degs.sum()) % 2:
        loop_at = _parity_loop_fix(degs, rng)
    g = configuration_match(degs, rng)
    if loop_at is None:
        return g
    eu = np.concatenate([g.eu, [loop_at]])
    ev = np.concatenate([g.ev, [loop_at]])
    return Multigraph.from_arrays(len(degs), eu, ev)


def sample_poisson_geometric(params: ModelParams, rng: np.random.Generator) -> Multigraph:
    """Kernel on the >= 3 degrees, every kernel edge stretched by Geom(1-mu)."""
    params.require_supercritical()
    if params.eps3n < 1:
        warnings.warn(
            f"eps^3 n = {params.eps3n:.3g} < 1: outside the recommended regime",
            stacklevel=2,
        )
    cap = _draw_capacity(params, rng)
    d = rng.poisson(cap, params.n)
    kernel = _kernel_from_degrees(d[d >= 3].astype(np.int64), rng)
    lengths = rng.geometric(1.0 - params.mu, size=kernel.m).astype(np.int64)
    return subdivide_edges(kernel, lengths)


def _assemble_staged(kernel: Multigraph, lengths: np.ndarray, bush_mean: float,
                     rng: np.random.Generator):
    """Shared tail of the staged builds: subdivide, attach trees, package."""
    core = subdivide_edges(kernel, lengths)
    parent, owner = sample_pgw_forest(bush_mean, core.n, rng)
    n_extra = len(parent) - core.n
    # forest node j maps to graph vertex j (roots are the core vertices) or
    # core.n + (j - core.n) for children; identical, so ids carry over
    child = np.arange(core.n, len(parent), dtype=np.int64)
    eu = np.concatenate([core.eu, parent[child]])
    ev = np.concatenate([core.ev, child])
    graph = Multigraph.from_arrays(core.n + n_extra, eu, ev)
    bushes = Bushes(owner=owner, parent=parent, roots=np.arange(core.n, dtype=np.int64))
    decomp = CoreDecomposition(
        component=graph,
        mapping=np.arange(graph.n, dtype=np.int64),
        core_vertices=np.arange(core.n, dtype=np.int64),
        stripped_cycle_lengths=[],
        stripped_core=core,
        stripped_map=np.arange(core.n, dtype=np.int64),
        kernel=kernel,
        kernel_vertex_map=np.arange(kernel.n, dtype=np.int64),
        path_lengths=lengths,
        bushes=bushes,
    )
    return graph, decomp


def sample_c1_general(params: ModelParams, rng: np.random.Generator):
    """Staged contiguous build: Po(capacity) kernel degrees (>= 3, even sum by
    rejection), Geom(1-mu) paths, PGW(mu) tree on every 2-core vertex."""
    params.require_supercritical()
    if params.eps3n < 10:
        warnings.warn(
            f"eps^3 n = {params.eps3n:.3g} < 10: staged build far from regime",
            stacklevel=2,
        )
    for _ in range(_PARITY_REDRAWS):
        cap = _draw_capacity(params, rng)
        d = rng.poisson(cap, params.n)
        degs = d[d >= 3].astype(np.int64)
        if int(degs.sum()) % 2 == 0:
            break
    else:
        raise RejectionError("degree-sum parity rejection exceeded 10^4 redraws")
    kernel = configuration_match(degs, rng)
    lengths = rng.geometric(1.0 - params.mu, size=kernel.m).astype(np.int64)
    return _assemble_staged(kernel, lengths, params.mu, rng)


def sample_c1_simple(params: ModelParams, rng: np.random.Generator):
    """Small-eps build: 3-regular kernel on 2*floor(Z) vertices, Geom(eps)
    paths, PGW(1-eps) trees."""
    params.require_supercritical()
    if params.eps4n > 5:
        warnings.warn(
            f"eps^4 n = {params.eps4n:.3g} > 5: outside the simple-build regime",
            stacklevel=2,
        )
    e3n = params.eps3n
    for _ in range(_PARITY_REDRAWS):
        z = rng.normal(2.0 / 3.0 * e3n, math.sqrt(e3n))
        n_kernel = 2 * int(math.floor(z))
        if n_kernel >= 2:
            break
    else:
        raise RejectionError("kernel size stayed < 2 after 10^4 redraws")
    kernel = configuration_match(np.full(n_kernel, 3, dtype=np.int64), rng)
    lengths = rng.geometric(params.eps, size=kernel.m).astype(np.int64)
    return _assemble_staged(kernel, lengths, 1.0 - params.eps, rng)


def sample(kind: ModelKind, params: ModelParams, rng: np.random.Generator):
    """Dispatch: returns (graph, decomposition-or-None)."""
    kind = ModelKind(kind)
    if kind is ModelKind.GNP:
        return sample_gnp(params, rng), None
    if kind is ModelKind.POISSON_CLONING:
        return sample_poisson_cloning(params, rng), None
    if kind is ModelKind.POISSON_CONFIGURATION:
        return sample_poisson_configuration(params, rng), None
    if kind is ModelKind.POISSON_GEOMETRIC:
        return sample_poisson_geometric(params, rng), None
    if kind is ModelKind.C1_GENERAL:
        return sample_c1_general(params, rng)
    return sample_c1_simple(params, rng)
