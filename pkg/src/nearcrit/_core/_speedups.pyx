# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled twins of the pure-python kernels in ``pure.py``.

Outputs are bit-identical to the pure versions; keep the two in sync.
"""

import numpy as np

cimport cython
from libc.math cimport NAN

BACKEND = "compiled"

DRAIN_STACK_EMPTY = 0
DRAIN_BOUNDARY = 1
DRAIN_STUCK = 3


def peel_two_core(indptr, nbr, eid, deg, n_edges, fifo=False):
    cdef long long[::1] indptr_v = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef long long[::1] nbr_v = np.ascontiguousarray(nbr, dtype=np.int64)
    cdef long long[::1] eid_v = np.ascontiguousarray(eid, dtype=np.int64)
    cdef long long[::1] deg_v = np.ascontiguousarray(deg, dtype=np.int64).copy()
    cdef Py_ssize_t n = deg_v.shape[0]
    alive_arr = np.ones(n, dtype=np.uint8)
    edge_alive_arr = np.ones(n_edges, dtype=np.uint8)
    queue_arr = np.empty(n + nbr_v.shape[0] + 1, dtype=np.int64)
    cdef unsigned char[::1] alive = alive_arr
    cdef unsigned char[::1] edge_alive = edge_alive_arr
    cdef long long[::1] queue = queue_arr
    cdef Py_ssize_t head = 0, tail = 0
    cdef Py_ssize_t v, k, w
    cdef long long e
    cdef bint use_fifo = 1 if fifo else 0
    for v in range(n):
        if deg_v[v] < 2:
            queue[tail] = v
            tail += 1
    while head < tail:
        if use_fifo:
            v = queue[head]
            head += 1
        else:
            tail -= 1
            v = queue[tail]
        if not alive[v]:
            continue
        alive[v] = 0
        for k in range(indptr_v[v], indptr_v[v + 1]):
            e = eid_v[k]
            if not edge_alive[e]:
                continue
            edge_alive[e] = 0
            w = nbr_v[k]
            if alive[w]:
                deg_v[w] -= 1
                if deg_v[w] == 1:
                    queue[tail] = w
                    tail += 1
    return alive_arr.astype(bool)


def bfs_fill(indptr, nbr, src, dist, parent=None):
    cdef long long[::1] indptr_v = indptr
    cdef long long[::1] nbr_v = nbr
    cdef int[::1] dist_v = dist
    cdef long long[::1] parent_v
    cdef bint want_parent = parent is not None
    cdef Py_ssize_t n = dist_v.shape[0]
    queue_arr = np.empty(n, dtype=np.int64)
    cdef long long[::1] queue = queue_arr
    cdef Py_ssize_t head = 0, tail = 0
    cdef Py_ssize_t v, k, w
    cdef int level, best_level = 0
    cdef long long far
    cdef Py_ssize_t i
    for i in range(n):
        dist_v[i] = -1
    if want_parent:
        parent_v = parent
        for i in range(n):
            parent_v[i] = -1
    cdef Py_ssize_t s = src
    dist_v[s] = 0
    far = s
    queue[tail] = s
    tail += 1
    while head < tail:
        v = queue[head]
        head += 1
        level = dist_v[v] + 1
        for k in range(indptr_v[v], indptr_v[v + 1]):
            w = nbr_v[k]
            if dist_v[w] == -1:
                dist_v[w] = level
                if want_parent:
                    parent_v[w] = v
                if level > best_level or (level == best_level and w < far):
                    best_level = level
                    far = w
                queue[tail] = w
                tail += 1
    return best_level, int(far)


def bfs_distances(indptr, nbr, src, n):
    dist = np.empty(n, dtype=np.int32)
    bfs_fill(indptr, nbr, src, dist)
    return dist


def eccentricity(indptr, nbr, src, n, scratch=None):
    dist = scratch if scratch is not None else np.empty(n, dtype=np.int32)
    level, _ = bfs_fill(indptr, nbr, src, dist)
    return level


def connected_labels(indptr, nbr, n):
    cdef long long[::1] indptr_v = indptr
    cdef long long[::1] nbr_v = nbr
    labels_arr = np.full(n, -1, dtype=np.int64)
    cdef long long[::1] labels = labels_arr
    cdef Py_ssize_t nn = n
    queue_arr = np.empty(nn if nn else 1, dtype=np.int64)
    cdef long long[::1] queue = queue_arr
    cdef Py_ssize_t head, tail, v, k, w, seed
    cdef long long label = 0
    for seed in range(nn):
        if labels[seed] != -1:
            continue
        labels[seed] = label
        head = 0
        tail = 0
        queue[tail] = seed
        tail += 1
        while head < tail:
            v = queue[head]
            head += 1
            for k in range(indptr_v[v], indptr_v[v + 1]):
                w = nbr_v[k]
                if labels[w] == -1:
                    labels[w] = label
                    queue[tail] = w
                    tail += 1
        label += 1
    return labels_arr


def forest_from_roots(indptr, nbr, is_root):
    cdef long long[::1] indptr_v = indptr
    cdef long long[::1] nbr_v = nbr
    root_arr = np.ascontiguousarray(is_root, dtype=np.uint8)
    cdef unsigned char[::1] root_v = root_arr
    cdef Py_ssize_t n = root_v.shape[0]
    owner_arr = np.full(n, -1, dtype=np.int64)
    parent_arr = np.full(n, -1, dtype=np.int64)
    cdef long long[::1] owner = owner_arr
    cdef long long[::1] parent = parent_arr
    queue_arr = np.empty(n if n else 1, dtype=np.int64)
    cdef long long[::1] queue = queue_arr
    cdef Py_ssize_t head = 0, tail = 0
    cdef Py_ssize_t v, k, w
    for v in range(n):
        if root_v[v]:
            owner[v] = v
            queue[tail] = v
            tail += 1
    while head < tail:
        v = queue[head]
        head += 1
        for k in range(indptr_v[v], indptr_v[v + 1]):
            w = nbr_v[k]
            if root_v[w]:
                continue
            if owner[w] == -1:
                owner[w] = owner[v]
                parent[w] = v
                queue[tail] = w
                tail += 1
    return owner_arr, parent_arr


def cola_drain(order, pos, cvert, vindptr, vclones, matched, partner, un_cnt,
               stack, active, mpairs, mpos, meta, fmeta, boundary):
    cdef long long[::1] order_v = order
    cdef double[::1] pos_v = pos
    cdef long long[::1] cvert_v = cvert
    cdef long long[::1] vindptr_v = vindptr
    cdef long long[::1] vclones_v = vclones
    cdef unsigned char[::1] matched_v = matched
    cdef long long[::1] partner_v = partner
    cdef long long[::1] un_cnt_v = un_cnt
    cdef long long[::1] stack_v = stack
    cdef unsigned char[::1] active_v = active
    cdef long long[::1] mpairs_v = mpairs
    cdef double[::1] mpos_v = mpos
    cdef long long[::1] meta_v = meta
    cdef double[::1] fmeta_v = fmeta
    cdef double bound = boundary

    cdef Py_ssize_t nc = order_v.shape[0]
    cdef Py_ssize_t stack_size = meta_v[0]
    cdef Py_ssize_t ptr = meta_v[1]
    cdef Py_ssize_t nm = meta_v[2]
    cdef Py_ssize_t depth_max = meta_v[3]
    cdef Py_ssize_t m_active = meta_v[4]
    cdef double line = fmeta_v[0]
    cdef int status = DRAIN_STACK_EMPTY
    cdef Py_ssize_t top, p, hit, u, w, k, c, v, idx
    while True:
        while stack_size > 0 and matched_v[stack_v[stack_size - 1]]:
            stack_size -= 1
        if stack_size == 0:
            status = 0
            break
        top = stack_v[stack_size - 1]
        p = ptr
        hit = -1
        while p < nc:
            c = order_v[p]
            if c != top and not matched_v[c]:
                hit = c
                break
            p += 1
        if hit == -1:
            status = 3
            break
        if pos_v[hit] < bound:
            line = bound
            status = 1
            break
        line = pos_v[hit]
        matched_v[top] = 1
        matched_v[hit] = 1
        partner_v[top] = hit
        partner_v[hit] = top
        mpairs_v[2 * nm] = top
        mpairs_v[2 * nm + 1] = hit
        mpos_v[nm] = line
        nm += 1
        stack_size -= 1
        ptr = p + 1
        u = cvert_v[top]
        w = cvert_v[hit]
        m_active += active_v[u]
        m_active += active_v[w]
        un_cnt_v[u] -= 1
        un_cnt_v[w] -= 1
        for idx in range(2):
            if idx == 0:
                v = u
            else:
                if w == u:
                    break
                v = w
            if un_cnt_v[v] == 1:
                for k in range(vindptr_v[v], vindptr_v[v + 1]):
                    c = vclones_v[k]
                    if not matched_v[c]:
                        stack_v[stack_size] = c
                        stack_size += 1
                        if stack_size > depth_max:
                            depth_max = stack_size
                        break
    meta_v[0] = stack_size
    meta_v[1] = ptr
    meta_v[2] = nm
    meta_v[3] = depth_max
    meta_v[4] = m_active
    fmeta_v[0] = line
    return status
