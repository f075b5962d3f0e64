"""Pure-python graph kernels (fallback for the compiled extension).

Every function here has a bit-identical twin in ``_speedups.pyx``; keep the
two in sync.  All take flat numpy arrays (CSR adjacency / incidence) so the
compiled versions can be drop-in replacements.
"""

from __future__ import annotations

import numpy as np

BACKEND = "pure"

# drain statuses shared with the compiled kernel
DRAIN_STACK_EMPTY = 0
DRAIN_BOUNDARY = 1
DRAIN_STUCK = 3


def peel_two_core(indptr, nbr, eid, deg, n_edges, fifo=False):
    """Peel vertices of degree < 2, return the alive mask (the 2-core).

    ``deg`` must already account for loops (ordinary loop = 2, special = 1);
    ``indptr``/``nbr``/``eid`` index non-loop edges only.  ``fifo`` switches
    the queue discipline (result is discipline-independent; used by tests).
    """
    n = len(deg)
    deg = deg.copy()
    alive = np.ones(n, dtype=bool)
    edge_alive = np.ones(n_edges, dtype=bool)
    queue = [v for v in range(n) if deg[v] < 2]
    head = 0
    while head < len(queue):
        if fifo:
            v = queue[head]
            head += 1
        else:
            v = queue.pop()
        if not alive[v]:
            continue
        alive[v] = False
        for k in range(indptr[v], indptr[v + 1]):
            e = eid[k]
            if not edge_alive[e]:
                continue
            edge_alive[e] = False
            w = nbr[k]
            if alive[w]:
                deg[w] -= 1
                if deg[w] == 1:
                    queue.append(w)
    return alive


def bfs_fill(indptr, nbr, src, dist, parent=None):
    """BFS from ``src``: fills int32 ``dist`` (-1 = unreachable), returns
    (eccentricity, farthest vertex).  ``parent`` is filled when given."""
    dist[:] = -1
    dist[src] = 0
    if parent is not None:
        parent[:] = -1
    frontier = np.array([src], dtype=np.int64)
    level = 0
    far = src
    while frontier.size:
        starts = indptr[frontier]
        counts = indptr[frontier + 1] - starts
        total = int(counts.sum())
        if total == 0:
            break
        # gather all neighbours of the frontier in one shot
        take = np.repeat(starts - np.concatenate(([0], np.cumsum(counts)[:-1])), counts)
        take += np.arange(total)
        cand = nbr[take]
        fresh = dist[cand] == -1
        cand = cand[fresh]
        if parent is not None and cand.size:
            parent[cand] = np.repeat(frontier, counts)[fresh]
        if cand.size == 0:
            break
        level += 1
        dist[cand] = level
        frontier = np.unique(cand)
        far = int(frontier[0])
    return level, far


def bfs_distances(indptr, nbr, src, n):
    dist = np.empty(n, dtype=np.int32)
    bfs_fill(indptr, nbr, src, dist)
    return dist


def eccentricity(indptr, nbr, src, n, scratch=None):
    dist = scratch if scratch is not None else np.empty(n, dtype=np.int32)
    dist[:] = -1
    dist[src] = 0
    frontier = np.array([src], dtype=np.int64)
    level = 0
    while frontier.size:
        starts = indptr[frontier]
        counts = indptr[frontier + 1] - starts
        total = int(counts.sum())
        if total == 0:
            break
        take = np.repeat(starts - np.concatenate(([0], np.cumsum(counts)[:-1])), counts)
        take += np.arange(total)
        cand = nbr[take]
        cand = cand[dist[cand] == -1]
        if cand.size == 0:
            break
        level += 1
        dist[cand] = level
        frontier = np.unique(cand)
    return level


def connected_labels(indptr, nbr, n):
    """Component labels, numbered by increasing smallest contained vertex."""
    labels = np.full(n, -1, dtype=np.int64)
    label = 0
    for seed in range(n):
        if labels[seed] != -1:
            continue
        labels[seed] = label
        frontier = np.array([seed], dtype=np.int64)
        while frontier.size:
            starts = indptr[frontier]
            counts = indptr[frontier + 1] - starts
            total = int(counts.sum())
            if total == 0:
                break
            take = np.repeat(
                starts - np.concatenate(([0], np.cumsum(counts)[:-1])), counts
            )
            take += np.arange(total)
            cand = nbr[take]
            cand = cand[labels[cand] == -1]
            if cand.size == 0:
                break
            labels[cand] = label
            frontier = np.unique(cand)
        label += 1
    return labels


def forest_from_roots(indptr, nbr, is_root):
    """Multi-root BFS that never crosses root-root edges.

    Returns (owner, parent): owner[v] = root whose tree contains v (roots own
    themselves), parent[v] = BFS parent (-1 for roots and unreached).
    """
    n = len(is_root)
    owner = np.full(n, -1, dtype=np.int64)
    parent = np.full(n, -1, dtype=np.int64)
    roots = np.nonzero(is_root)[0]
    owner[roots] = roots
    frontier = roots
    while frontier.size:
        starts = indptr[frontier]
        counts = indptr[frontier + 1] - starts
        total = int(counts.sum())
        if total == 0:
            break
        take = np.repeat(starts - np.concatenate(([0], np.cumsum(counts)[:-1])), counts)
        take += np.arange(total)
        cand = nbr[take]
        src = np.repeat(frontier, counts)
        keep = (~is_root[cand]) & (owner[cand] == -1)
        cand = cand[keep]
        src = src[keep]
        if cand.size == 0:
            break
        # first claim wins; duplicate claims within a level are resolved by
        # array order, identically in both backends
        order = np.argsort(cand, kind="stable")
        cand = cand[order]
        src = src[order]
        first = np.ones(len(cand), dtype=bool)
        first[1:] = cand[1:] != cand[:-1]
        cand = cand[first]
        src = src[first]
        owner[cand] = owner[src]
        parent[cand] = src
        frontier = cand
    return owner, parent


def cola_drain(order, pos, cvert, vindptr, vclones, matched, partner, un_cnt,
               stack, active, mpairs, mpos, meta, fmeta, boundary):
    """Light-clone drain of the cut-off line sweep: pop-and-match until the
    stack empties or the line reaches ``boundary``.

    meta  (int64[5]): stack_size, ptr, n_matches, stack_depth_max, m_active
    fmeta (float64[1]): current line coordinate
    Returns a DRAIN_* status.  All arrays are mutated in place.
    """
    nc = len(order)
    stack_size = int(meta[0])
    ptr = int(meta[1])
    nm = int(meta[2])
    depth_max = int(meta[3])
    m_active = int(meta[4])
    line = float(fmeta[0])
    status = DRAIN_STACK_EMPTY
    while True:
        while stack_size > 0 and matched[stack[stack_size - 1]]:
            stack_size -= 1
        if stack_size == 0:
            status = DRAIN_STACK_EMPTY
            break
        top = stack[stack_size - 1]
        # sweep left to the next unmatched clone (skipping `top` itself)
        p = ptr
        hit = -1
        while p < nc:
            c = order[p]
            if c != top and not matched[c]:
                hit = c
                break
            p += 1
        if hit == -1:
            status = DRAIN_STUCK
            break
        if pos[hit] < boundary:
            line = boundary
            status = DRAIN_BOUNDARY
            break
        line = pos[hit]
        matched[top] = 1
        matched[hit] = 1
        partner[top] = hit
        partner[hit] = top
        mpairs[2 * nm] = top
        mpairs[2 * nm + 1] = hit
        mpos[nm] = line
        nm += 1
        stack_size -= 1
        ptr = p + 1
        u = cvert[top]
        w = cvert[hit]
        m_active += int(active[u]) + int(active[w])
        un_cnt[u] -= 1
        un_cnt[w] -= 1
        verts = (u,) if u == w else (u, w)
        for v in verts:
            if un_cnt[v] == 1:
                for k in range(vindptr[v], vindptr[v + 1]):
                    c = vclones[k]
                    if not matched[c]:
                        stack[stack_size] = c
                        stack_size += 1
                        if stack_size > depth_max:
                            depth_max = stack_size
                        break
    meta[0] = stack_size
    meta[1] = ptr
    meta[2] = nm
    meta[3] = depth_max
    meta[4] = m_active
    fmeta[0] = line
    return status
