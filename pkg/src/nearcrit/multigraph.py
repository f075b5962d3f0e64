"""Loop- and multi-edge-capable undirected graph plus the half-edge matcher.

Degree conventions: a non-loop endpoint contributes 1, an ordinary loop 2,
and a "special" loop (the odd-clone fix of the cloning model) 1.  Traversal
primitives (BFS, components) act on the underlying simple graph, where loops
and multiplicities are irrelevant.
"""

from __future__ import annotations

import io
from typing import IO, Iterable

import numpy as np

from . import _core

__all__ = [
    "EdgeListParseError",
    "Multigraph",
    "ParityError",
    "bfs_distances",
    "configuration_match",
    "connected_components",
    "deserialize",
    "largest_component",
    "serialize",
    "subdivide_edges",
]


class ParityError(ValueError):
    """Raised when a degree sequence with odd sum is fed to the matcher."""


class EdgeListParseError(ValueError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class Multigraph:
    """Immutable multigraph: vertex count + normalized (u <= v) edge arrays."""

    __slots__ = ("n", "eu", "ev", "special", "_adj", "_inc", "_deg")

    def __init__(self, n: int, edges: Iterable = ()):
        if isinstance(edges, tuple) and len(edges) in (2, 3) and isinstance(edges[0], np.ndarray):
            eu, ev = edges[0], edges[1]
            special = edges[2] if len(edges) == 3 else None
        else:
            rows = list(edges)
            eu = np.array([r[0] for r in rows], dtype=np.int64)
            ev = np.array([r[1] for r in rows], dtype=np.int64)
            special = np.array(
                [bool(r[2]) if len(r) > 2 else False for r in rows], dtype=bool
            )
            if not special.any():
                special = None
        eu = np.asarray(eu, dtype=np.int64)
        ev = np.asarray(ev, dtype=np.int64)
        if eu.shape != ev.shape:
            raise ValueError("edge endpoint arrays must have equal length")
        if len(eu) and (eu.min() < 0 or max(eu.max(), ev.max()) >= n):
            raise ValueError("edge endpoint out of range")
        if special is not None and len(special) and special.any():
            special = np.asarray(special, dtype=bool)
            if (eu[special] != ev[special]).any():
                raise ValueError("special edges must be loops")
        else:
            special = None
        self.n = int(n)
        self.eu = np.minimum(eu, ev)
        self.ev = np.maximum(eu, ev)
        self.special = special
        for arr in (self.eu, self.ev, self.special):
            if arr is not None:
                arr.setflags(write=False)
        self._adj = None
        self._inc = None
        self._deg = None

    @classmethod
    def from_arrays(cls, n, eu, ev, special=None):
        eu = np.asarray(eu, dtype=np.int64)
        ev = np.asarray(ev, dtype=np.int64)
        return cls(n, (eu, ev, special) if special is not None else (eu, ev))

    @property
    def m(self) -> int:
        return len(self.eu)

    def degrees(self) -> np.ndarray:
        if self._deg is None:
            deg = np.bincount(self.eu, minlength=self.n)
            deg += np.bincount(self.ev, minlength=self.n)
            if self.special is not None:
                # a special loop was counted twice above but contributes 1
                deg -= np.bincount(self.eu[self.special], minlength=self.n)
            self._deg = deg
            self._deg.setflags(write=False)
        return self._deg

    def _nonloop_mask(self) -> np.ndarray:
        return self.eu != self.ev

    def adjacency(self):
        """CSR (indptr, nbr) over non-loop edges, multiplicities kept."""
        if self._adj is None:
            mask = self._nonloop_mask()
            u, v = self.eu[mask], self.ev[mask]
            src = np.concatenate([u, v])
            dst = np.concatenate([v, u])
            order = np.argsort(src, kind="stable")
            nbr = dst[order]
            indptr = np.zeros(self.n + 1, dtype=np.int64)
            np.cumsum(np.bincount(src, minlength=self.n), out=indptr[1:])
            self._adj = (indptr, nbr)
        return self._adj

    def incidence(self):
        """CSR (indptr, nbr, eid) over non-loop edges, for peeling."""
        if self._inc is None:
            mask = self._nonloop_mask()
            ids = np.nonzero(mask)[0]
            u, v = self.eu[mask], self.ev[mask]
            src = np.concatenate([u, v])
            dst = np.concatenate([v, u])
            eid = np.concatenate([ids, ids])
            order = np.argsort(src, kind="stable")
            indptr = np.zeros(self.n + 1, dtype=np.int64)
            np.cumsum(np.bincount(src, minlength=self.n), out=indptr[1:])
            self._inc = (indptr, dst[order], eid[order])
        return self._inc

    def edge_multiset(self):
        """Sorted list of (u, v, special) triples; canonical for comparisons."""
        spec = (
            self.special
            if self.special is not None
            else np.zeros(self.m, dtype=bool)
        )
        return sorted(zip(self.eu.tolist(), self.ev.tolist(), spec.tolist()))

    def induced(self, vertices: np.ndarray):
        """Induced subgraph on ``vertices``, densely relabeled.

        Returns (subgraph, mapping) with mapping[new_id] = old_id.
        """
        vertices = np.asarray(vertices, dtype=np.int64)
        local = np.full(self.n, -1, dtype=np.int64)
        local[vertices] = np.arange(len(vertices))
        keep = (local[self.eu] >= 0) & (local[self.ev] >= 0)
        eu = local[self.eu[keep]]
        ev = local[self.ev[keep]]
        special = self.special[keep] if self.special is not None else None
        return Multigraph.from_arrays(len(vertices), eu, ev, special), vertices

    def __repr__(self):
        return f"Multigraph(n={self.n}, m={self.m})"


def configuration_match(degrees, rng: np.random.Generator) -> Multigraph:
    """Uniform multigraph with the given degree sequence (half-edge pairing).

    Shuffles the half-edge array once and pairs consecutive entries, which is
    exactly uniform over perfect matchings.
    """
    degrees = np.asarray(degrees, dtype=np.int64)
    if len(degrees) and degrees.min() < 0:
        raise ValueError("degrees must be non-negative")
    total = int(degrees.sum())
    if total % 2:
        raise ParityError(f"degree sum {total} is odd")
    half = np.repeat(np.arange(len(degrees), dtype=np.int64), degrees)
    perm = rng.permutation(half)
    return Multigraph.from_arrays(len(degrees), perm[0::2], perm[1::2])


def bfs_distances(g: Multigraph, source: int) -> np.ndarray:
    """Unweighted distances on the underlying simple graph (inf if unreachable)."""
    if not 0 <= source < g.n:
        raise ValueError(f"source {source} out of range")
    indptr, nbr = g.adjacency()
    raw = _core.bfs_distances(indptr, nbr, source, g.n)
    dist = raw.astype(np.float64)
    dist[raw < 0] = np.inf
    return dist


def connected_components(g: Multigraph) -> np.ndarray:
    """Component labels; label order follows the smallest contained vertex."""
    indptr, nbr = g.adjacency()
    return _core.connected_labels(indptr, nbr, g.n)


def largest_component(g: Multigraph) -> np.ndarray:
    """Vertices of the largest component (ties: smallest contained vertex id)."""
    if g.n == 0:
        return np.empty(0, dtype=np.int64)
    labels = connected_components(g)
    sizes = np.bincount(labels)
    # labels are numbered by increasing smallest vertex, so argmax resolves
    # ties toward the component holding the smallest id
    return np.nonzero(labels == int(np.argmax(sizes)))[0]


def subdivide_edges(g: Multigraph, lengths) -> Multigraph:
    """Replace edge i by a path of ``lengths[i]`` edges (internal vertices new).

    Length-1 edges are kept as-is; loops become cycles through new vertices.
    """
    lengths = np.asarray(lengths, dtype=np.int64)
    if len(lengths) != g.m:
        raise ValueError("need one length per edge")
    if len(lengths) and lengths.min() < 1:
        raise ValueError("path lengths must be >= 1")
    if g.special is not None:
        raise ValueError("refusing to subdivide special loops")
    extra = lengths - 1
    total_edges = int(lengths.sum())
    owner = np.repeat(np.arange(g.m, dtype=np.int64), lengths)
    first_edge = np.zeros(g.m, dtype=np.int64)
    np.cumsum(lengths[:-1], out=first_edge[1:])
    pos = np.arange(total_edges, dtype=np.int64) - first_edge[owner]
    base = np.zeros(g.m, dtype=np.int64)
    np.cumsum(extra[:-1], out=base[1:])
    internal_left = g.n + base[owner] + pos - 1
    internal_right = g.n + base[owner] + pos
    eu = np.where(pos == 0, g.eu[owner], internal_left)
    ev = np.where(pos == lengths[owner] - 1, g.ev[owner], internal_right)
    return Multigraph.from_arrays(g.n + int(extra.sum()), eu, ev)


def serialize(g: Multigraph, sink) -> None:
    """Edge-list text format: "n m" header, then "u v" / "u u s" lines."""
    own = isinstance(sink, str)
    f: IO[str] = open(sink, "w", encoding="utf-8", newline="\n") if own else sink
    try:
        f.write(f"{g.n} {g.m}\n")
        spec = g.special
        if spec is None:
            f.writelines(f"{u} {v}\n" for u, v in zip(g.eu.tolist(), g.ev.tolist()))
        else:
            f.writelines(
                f"{u} {v} s\n" if s else f"{u} {v}\n"
                for u, v, s in zip(g.eu.tolist(), g.ev.tolist(), spec.tolist())
            )
    finally:
        if own:
            f.close()


def deserialize(source) -> Multigraph:
    """Inverse of :func:`serialize`; raises EdgeListParseError with a line number."""
    own = isinstance(source, str)
    f: IO[str] = open(source, "r", encoding="utf-8") if own else source
    try:
        header = f.readline()
        parts = header.split()
        if len(parts) != 2:
            raise EdgeListParseError(1, f"expected 'n m' header, got {header!r}")
        try:
            n, m = int(parts[0]), int(parts[1])
        except ValueError:
            raise EdgeListParseError(1, f"non-integer header {header!r}") from None
        if n < 0 or m < 0:
            raise EdgeListParseError(1, "negative counts in header")
        eu = np.empty(m, dtype=np.int64)
        ev = np.empty(m, dtype=np.int64)
        special = np.zeros(m, dtype=bool)
        for i in range(m):
            line = f.readline()
            no = i + 2
            if not line:
                raise EdgeListParseError(no, f"expected {m} edges, file ended at {i}")
            parts = line.split()
            if len(parts) == 3 and parts[2] == "s":
                special[i] = True
            elif len(parts) != 2:
                raise EdgeListParseError(no, f"malformed edge line {line!r}")
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise EdgeListParseError(no, f"non-integer endpoints {line!r}") from None
            if not (0 <= u < n and 0 <= v < n):
                raise EdgeListParseError(no, f"endpoint out of range in {line!r}")
            if special[i] and u != v:
                raise EdgeListParseError(no, "special edge must be a loop")
            eu[i], ev[i] = u, v
        trailer = f.readline()
        if trailer.strip():
            raise EdgeListParseError(m + 2, f"unexpected extra line {trailer!r}")
        return Multigraph.from_arrays(n, eu, ev, special if special.any() else None)
    finally:
        if own:
            f.close()


def to_edge_list_text(g: Multigraph) -> str:
    buf = io.StringIO()
    serialize(g, buf)
    return buf.getvalue()
