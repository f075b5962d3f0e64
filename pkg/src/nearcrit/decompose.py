"""Structural dissection of a component: 2-core, disjoint cycles, kernel, bushes.

The peeling order never matters (the 2-core is unique); disjoint cycles are
the all-degree-2 components of the core and must be stripped before the
kernel contraction, which replaces every maximal 2-path by a single edge
annotated with its length.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import _core
from .analytic import RootedTree
from .multigraph import Multigraph

__all__ = [
    "Bushes",
    "CoreDecomposition",
    "StructureError",
    "contract_to_kernel",
    "decompose",
    "extract_bushes",
    "strip_disjoint_cycles",
    "two_core",
]


class StructureError(RuntimeError):
    """An input violated a structural precondition (or an upstream bug)."""


def two_core(g: Multigraph) -> np.ndarray:
    """Vertex set of the maximum induced subgraph with all degrees >= 2.

    Queue-based peeling; ordinary loops count 2 toward degree, special
    loops 1.
    """
    indptr, nbr, eid = g.incidence()
    alive = _core.peel_two_core(indptr, nbr, eid, g.degrees(), g.m)
    return np.nonzero(alive)[0]


def strip_disjoint_cycles(core: Multigraph):
    """Remove core components that are bare cycles (every degree exactly 2).

    Input must have min degree >= 2.  Returns (stripped core, kept vertex
    ids, cycle lengths).  A lone loop is a length-1 cycle, a double edge a
    length-2 cycle.
    """
    if core.n == 0:
        return core, np.empty(0, dtype=np.int64), []
    deg = core.degrees()
    if deg.min() < 2:
        raise StructureError("strip_disjoint_cycles expects min degree >= 2")
    indptr, nbr = core.adjacency()
    labels = _core.connected_labels(indptr, nbr, core.n)
    n_comp = int(labels.max()) + 1
    comp_size = np.bincount(labels, minlength=n_comp)
    # a component is a bare cycle iff all its vertices have degree exactly 2
    deg2 = deg == 2
    deg2_count = np.bincount(labels[deg2], minlength=n_comp)
    is_cycle = deg2_count == comp_size
    cycle_lengths = sorted(int(s) for s in comp_size[is_cycle])
    keep = np.nonzero(~is_cycle[labels])[0]
    stripped, _ = core.induced(keep)
    return stripped, keep, cycle_lengths


def contract_to_kernel(stripped: Multigraph):
    """Contract every maximal 2-path of a stripped core to a kernel edge.

    Kernel vertices are the degree->=3 vertices; each kernel edge carries the
    length of the 2-path it replaces (1 for an original edge, and paths that
    return to their starting vertex become loops).  Raises StructureError if
    a bare-cycle component survives; the caller must strip first.

    Returns (kernel, path_lengths, kernel_vertex_map) where
    kernel_vertex_map[k] is the stripped-core vertex id of kernel vertex k.
    """
    deg = stripped.degrees()
    if stripped.n and deg.min() < 2:
        raise StructureError("kernel contraction expects min degree >= 2")
    kernel_vertices = np.nonzero(deg >= 3)[0]
    local = np.full(stripped.n, -1, dtype=np.int64)
    local[kernel_vertices] = np.arange(len(kernel_vertices))
    if stripped.n and len(kernel_vertices) == 0:
        raise StructureError("no kernel vertex: input still contains bare cycles")

    # incidence over all edges including loops; loops at kernel vertices are
    # kernel edges of length 1 handled separately
    indptr, nbr, eid = stripped.incidence()
    edge_used = np.zeros(stripped.m, dtype=bool)
    k_eu, k_ev, lengths = [], [], []

    loops = np.nonzero(stripped.eu == stripped.ev)[0]
    for e in loops:
        v = int(stripped.eu[e])
        if local[v] < 0:
            raise StructureError("loop at a degree-2 vertex survived stripping")
        edge_used[e] = True
        k_eu.append(local[v])
        k_ev.append(local[v])
        lengths.append(1)

    for kv in kernel_vertices:
        for k in range(indptr[kv], indptr[kv + 1]):
            e = int(eid[k])
            if edge_used[e]:
                continue
            # walk the 2-path starting with this edge
            edge_used[e] = True
            prev = int(kv)
            cur = int(nbr[k])
            steps = 1
            while local[cur] < 0:
                # interior vertex: degree 2, leave along the other live edge
                nxt = -1
                for k2 in range(indptr[cur], indptr[cur + 1]):
                    e2 = int(eid[k2])
                    if not edge_used[e2]:
                        nxt = int(nbr[k2])
                        edge_used[e2] = True
                        break
                if nxt < 0:
                    raise StructureError("2-path ended at a degree-2 vertex")
                prev, cur = cur, nxt
                steps += 1
            k_eu.append(int(local[kv]))
            k_ev.append(int(local[cur]))
            lengths.append(steps)

    if not edge_used.all():
        raise StructureError("unreached edges: a bare-cycle component survived")
    kernel = Multigraph(
        len(kernel_vertices),
        (np.array(k_eu, dtype=np.int64), np.array(k_ev, dtype=np.int64)),
    )
    return kernel, np.array(lengths, dtype=np.int64), kernel_vertices


@dataclass(frozen=True)
class Bushes:
    """Forest hanging off the 2-core: arrays over component-local vertex ids."""

    owner: np.ndarray   # owning core vertex per vertex (roots own themselves)
    parent: np.ndarray  # BFS parent, -1 for core vertices
    roots: np.ndarray   # core vertex ids (local)

    def sizes(self) -> np.ndarray:
        """Bush size per root, each root counting itself."""
        counts = np.bincount(self.owner, minlength=len(self.parent))
        return counts[self.roots]

    def tree(self, root: int) -> RootedTree:
        """Materialize one bush as a RootedTree (root = core vertex)."""
        members = np.nonzero(self.owner == root)[0]
        children: dict[int, list[int]] = {}
        for v in members.tolist():
            if v == root:
                continue
            children.setdefault(int(self.parent[v]), []).append(v)
        seq = [int(root)]
        i = 0
        while i < len(seq):
            seq.extend(children.get(seq[i], ()))
            i += 1
        if len(seq) != len(members):
            raise StructureError("bush parent chain is broken")
        order = {v: i for i, v in enumerate(seq)}
        parent_arr = np.empty(len(seq), dtype=np.int64)
        parent_arr[0] = -1
        for v in seq[1:]:
            parent_arr[order[v]] = order[int(self.parent[v])]
        return RootedTree(parent=parent_arr)


def extract_bushes(g: Multigraph, core_vertices: np.ndarray) -> Bushes:
    """Trees of non-core vertices hanging off each 2-core vertex.

    ``core_vertices`` must be the 2-core of g's analyzed component; every
    vertex of g must be reachable from the core without core-core edges.
    A component with an empty 2-core (a tree) has no bushes.
    """
    core_vertices = np.asarray(core_vertices, dtype=np.int64)
    if len(core_vertices) == 0:
        return Bushes(
            owner=np.full(g.n, -1, dtype=np.int64),
            parent=np.full(g.n, -1, dtype=np.int64),
            roots=core_vertices,
        )
    is_core = np.zeros(g.n, dtype=bool)
    is_core[core_vertices] = True
    indptr, nbr = g.adjacency()
    owner, parent = _core.forest_from_roots(indptr, nbr, is_core)
    if (owner < 0).any():
        raise StructureError("vertex not attached to any core vertex")
    # forest check: edges not inside the core must number exactly the
    # non-core vertices, otherwise a cycle escaped the 2-core (upstream bug)
    noncore_edges = int((~(is_core[g.eu] & is_core[g.ev])).sum())
    if noncore_edges != g.n - len(core_vertices):
        raise StructureError("non-core part is not a forest")
    return Bushes(owner=owner, parent=parent, roots=np.asarray(core_vertices))


@dataclass(frozen=True)
class CoreDecomposition:
    """Full dissection of one component.

    All vertex ids are local to ``component`` (mapping[local] = original id
    in the sampled graph).  ``core_vertices`` is the full 2-core including
    its disjoint cycles; ``kernel_vertex_map`` sends kernel ids to local ids.
    """

    component: Multigraph
    mapping: np.ndarray
    core_vertices: np.ndarray
    stripped_cycle_lengths: list
    stripped_core: Multigraph
    stripped_map: np.ndarray
    kernel: Multigraph
    kernel_vertex_map: np.ndarray
    path_lengths: np.ndarray
    bushes: Bushes

    @property
    def core_size(self) -> int:
        return len(self.core_vertices)

    @property
    def stripped_cycle_vertex_count(self) -> int:
        return int(sum(self.stripped_cycle_lengths))

    def bush_sizes(self) -> np.ndarray:
        return self.bushes.sizes()

    def validate(self) -> None:
        """Assert the structural invariants (used heavily by tests)."""
        if self.kernel.n:
            kdeg = self.kernel.degrees()
            if kdeg.min() < 3:
                raise StructureError("kernel vertex of degree < 3")
        if int(self.path_lengths.sum()) != self.stripped_core.m:
            raise StructureError("path lengths do not cover the stripped core")
        if self.stripped_core.n != self.kernel.n + int(
            (self.path_lengths - 1).sum()
        ):
            raise StructureError("stripped core size mismatch")
        if self.core_size:
            sizes = self.bush_sizes()
            if int(sizes.sum()) != self.component.n:
                raise StructureError("bushes do not partition the component")

    def summary(self) -> dict:
        return {
            "core_size": self.core_size,
            "stripped_cycle_lengths": [int(x) for x in self.stripped_cycle_lengths],
            "kernel_vertices": self.kernel.n,
            "kernel_edges": self.kernel.m,
            "path_lengths": [int(x) for x in self.path_lengths],
            "bush_sizes": [int(x) for x in self.bush_sizes()],
        }

    def summary_json(self) -> str:
        return json.dumps(self.summary(), sort_keys=True)


def decompose(g: Multigraph, component: np.ndarray | None = None) -> CoreDecomposition:
    """Dissect one component of ``g`` (default: the largest).

    Pipeline: restrict to the component, peel the 2-core, strip disjoint
    cycles, contract 2-paths to the kernel, extract the bushes.
    """
    from .multigraph import largest_component

    if component is None:
        component = largest_component(g)
    comp, mapping = g.induced(np.asarray(component, dtype=np.int64))
    core_local = two_core(comp)
    core_graph, _ = comp.induced(core_local)
    stripped_rel, kept_rel, cycles = strip_disjoint_cycles(core_graph)
    stripped_map = core_local[kept_rel] if len(kept_rel) else kept_rel
    kernel, path_lengths, kmap_rel = contract_to_kernel(stripped_rel)
    kernel_vertex_map = (
        stripped_map[kmap_rel] if len(kmap_rel) else kmap_rel
    )
    bushes = extract_bushes(comp, core_local)
    return CoreDecomposition(
        component=comp,
        mapping=mapping,
        core_vertices=core_local,
        stripped_cycle_lengths=cycles,
        stripped_core=stripped_rel,
        stripped_map=stripped_map,
        kernel=kernel,
        kernel_vertex_map=kernel_vertex_map,
        path_lengths=path_lengths,
        bushes=bushes,
    )
