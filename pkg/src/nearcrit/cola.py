"""Poisson cell generation and the cut-off line matching algorithm.

A cell assigns each vertex a Po(lambda) number of clones with i.i.d. uniform
coordinates in [0, lambda).  The line starts at lambda and sweeps left; while
any vertex has <= 1 unmatched clones ("light"), the top light clone is
matched to the next unmatched clone the line hits.  The line coordinate at
the first moment no light clone exists is ``lambda_c``: the clones still
unmatched at that instant are exactly the 2-core's half-edges.  Afterwards
the sweep continues from uniformly chosen active clones until the matching
is complete, which is distributionally the plain configuration model on the
leftover clones.

Everything before ``lambda_c`` is a deterministic function of the cell: the
phase boundaries (parameter ``beta``) only affect bookkeeping labels, and
the post-``lambda_c`` seeding randomness is drawn from a stream that is
consumed only after the cell is generated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _core
from .analytic import theta_lambda
from .multigraph import Multigraph

__all__ = [
    "ColaResult",
    "LambdaCell",
    "PhaseStats",
    "default_beta",
    "generate_cell",
    "lambda_c_invariance_check",
    "run_cola",
]


@dataclass(frozen=True)
class LambdaCell:
    """Per-vertex clone coordinates in [0, lambda), sorted descending."""

    n: int
    lam: float
    indptr: np.ndarray   # vertex -> slice into clone arrays
    vertex: np.ndarray   # owning vertex per clone
    pos: np.ndarray      # coordinate per clone (descending within a vertex)

    @property
    def total_clones(self) -> int:
        return len(self.pos)

    def counts(self) -> np.ndarray:
        return np.diff(self.indptr)


def generate_cell(n: int, lam: float, rng: np.random.Generator) -> LambdaCell:
    """Po(lam) clones per vertex, coordinates i.i.d. uniform in [0, lam)."""
    if lam < 0:
        raise ValueError(f"lambda must be >= 0, got {lam}")
    counts = rng.poisson(lam, n).astype(np.int64) if lam > 0 else np.zeros(n, np.int64)
    total = int(counts.sum())
    vertex = np.repeat(np.arange(n, dtype=np.int64), counts)
    pos = rng.uniform(0.0, lam, size=total)
    # sort by (vertex asc, position desc); vertex blocks are already grouped
    order = np.lexsort((-pos, vertex))
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return LambdaCell(n=n, lam=lam, indptr=indptr, vertex=vertex, pos=pos[order])


def default_beta(lam: float) -> float:
    """Bracket lower end (1 - theta)/3; 1/3 at or below criticality."""
    if lam <= 1.0 + 1e-9:
        return 1.0 / 3.0
    return (1.0 - theta_lambda(lam)) / 3.0


@dataclass(frozen=True)
class PhaseStats:
    phase: int
    boundary: float          # end-of-phase line coordinate (1-beta)^j * lam
    n_active: int            # N_j: unmatched j-active clones at phase start
    light_lower: int         # L_j = N_j - H_j, lower bound on light clones
    matched_active: int      # M_j: j-active clones matched during the phase
    b_transitions: int       # B_j: cell-geometry transition count
    stack_depth_max: int
    ended_on_passive_top: bool  # A_j


@dataclass
class ColaResult:
    lam: float
    beta: float
    lambda_c: float
    matching: np.ndarray        # (k, 2) matched clone index pairs
    match_positions: np.ndarray  # line coordinate of each line-driven match
    special_clone: int | None
    phase_trace: list
    unmatched_at_lambda_c: np.ndarray
    completed: bool             # full matching (False if stopped at lambda_c)
    cell: LambdaCell = field(repr=False)

    def to_multigraph(self, include_special: bool = True) -> Multigraph:
        """Contract matched clone pairs into edges.

        ``include_special`` appends the degree-1 special loop, giving the
        full cloning-model graph; the bare matching graph (False) is the one
        whose peeled 2-core coincides exactly with the vertices holding >= 2
        unmatched clones at lambda_c.
        """
        v = self.cell.vertex
        eu = v[self.matching[:, 0]]
        ev = v[self.matching[:, 1]]
        if include_special and self.special_clone is not None:
            sv = v[self.special_clone]
            eu = np.concatenate([eu, [sv]])
            ev = np.concatenate([ev, [sv]])
            sp = np.zeros(len(eu), dtype=bool)
            sp[-1] = True
            return Multigraph.from_arrays(self.cell.n, eu, ev, sp)
        return Multigraph.from_arrays(self.cell.n, eu, ev)

    def core_vertices_at_lambda_c(self) -> np.ndarray:
        """Vertices holding >= 2 unmatched clones when the line hit lambda_c."""
        counts = np.bincount(
            self.cell.vertex[self.unmatched_at_lambda_c], minlength=self.cell.n
        )
        return np.nonzero(counts >= 2)[0]

    def trace_csv(self) -> str:
        lines = ["phase,boundary,N_j,L_j_lower,M_j,B_j,stack_depth_max"]
        for ph in self.phase_trace:
            lines.append(
                f"{ph.phase},{ph.boundary!r},{ph.n_active},{ph.light_lower},"
                f"{ph.matched_active},{ph.b_transitions},{ph.stack_depth_max}"
            )
        return "\n".join(lines) + "\n"


def _left_counts(cell: LambdaCell, x: float, skip: int | None = None) -> np.ndarray:
    """Number of clones of each vertex with coordinate strictly below x.

    ``skip`` drops the special clone: once translated into a self-loop it is
    no longer a point of the cell, so labels and transition counts must not
    see it.
    """
    counts = np.bincount(cell.vertex[cell.pos < x], minlength=cell.n)
    if skip is not None and cell.pos[skip] < x:
        counts[cell.vertex[skip]] -= 1
    return counts


def run_cola(cell: LambdaCell, beta: float | None = None,
             stop_at_lambda_c: bool = False,
             rng: np.random.Generator | None = None) -> ColaResult:
    """Phase-by-phase cut-off line run over a cell.

    ``rng`` feeds only the odd-total special-clone pick, the post-lambda_c
    seeding choices, and the final completion of leftover passive cycles; it
    may be omitted when ``stop_at_lambda_c`` is set and the clone total is
    even.  ``beta`` defaults to the bracket value (1 - theta)/3 and is only
    bookkeeping: lambda_c does not depend on it.
    """
    if beta is None:
        beta = default_beta(cell.lam)
    if not 0.0 < beta < 1.0:
        raise ValueError(f"beta must lie in (0, 1), got {beta}")

    n, nc = cell.n, cell.total_clones
    matched = np.zeros(nc, dtype=np.uint8)
    partner = np.full(nc, -1, dtype=np.int64)
    un_cnt = np.diff(cell.indptr).copy()
    special_clone = None
    if nc % 2:
        if rng is None:
            raise ValueError("odd clone total needs rng for the special pick")
        special_clone = int(rng.integers(nc))
        matched[special_clone] = 1
        un_cnt[cell.vertex[special_clone]] -= 1

    order = np.argsort(-cell.pos, kind="stable")
    # clones are stored grouped by vertex, so the per-vertex clone list is
    # the identity over cell.indptr slices
    vclones = np.arange(nc, dtype=np.int64)
    stack = np.empty(nc + 1, dtype=np.int64)
    stack_size = 0
    # initial stack: clones of light vertices, pushed in (vertex, clone) order
    light_init = np.nonzero(un_cnt == 1)[0]
    for v in light_init:
        for k in range(cell.indptr[v], cell.indptr[v + 1]):
            if not matched[k]:
                stack[stack_size] = k
                stack_size += 1
                break

    mpairs = np.empty(2 * (nc // 2 + 1), dtype=np.int64)
    mpos = np.empty(nc // 2 + 1, dtype=np.float64)
    meta = np.array([stack_size, 0, 0, stack_size, 0], dtype=np.int64)
    fmeta = np.array([cell.lam], dtype=np.float64)

    lambda_c = None
    unmatched_snapshot = None
    trace: list[PhaseStats] = []
    completed = False

    phase = 1
    left_start = _left_counts(cell, fmeta[0], skip=special_clone)
    while True:
        boundary = (1.0 - beta) ** phase * cell.lam
        # labels are fixed for the whole phase
        passive = (left_start == 2) & (un_cnt == 2)
        active = (~passive).astype(np.uint8)
        n_active = int((un_cnt * active).sum())
        h_j = int(left_start[left_start > 2].sum())
        meta[3] = meta[0]  # reset per-phase stack-depth max
        meta[4] = 0
        n_prematched = 1 if special_clone is not None else 0
        active_pool: np.ndarray | None = None
        pool_live = 0
        phase_over = False
        concluded = False
        while not phase_over:
            status = _core.cola_drain(
                order, cell.pos, cell.vertex, cell.indptr, vclones,
                matched, partner, un_cnt, stack, active, mpairs, mpos, meta, fmeta,
                boundary,
            )
            if status == _core.DRAIN_BOUNDARY:
                phase_over = True
                break
            if status == _core.DRAIN_STUCK:
                raise RuntimeError("sweep found a lone unmatched clone (parity bug)")
            # stack empty: record lambda_c on first occurrence, then seed
            if lambda_c is None:
                lambda_c = float(fmeta[0])
                unmatched_snapshot = np.nonzero(matched == 0)[0]
                if stop_at_lambda_c:
                    phase_over = True
                    concluded = True
                    break
            if 2 * int(meta[2]) + n_prematched == nc:
                concluded = True
                break
            if active_pool is None:
                active_pool = np.nonzero((matched == 0) & (active[cell.vertex] == 1))[0]
                pool_live = len(active_pool)
            seeded = False
            while pool_live > 0:
                if rng is None:
                    raise ValueError("running past lambda_c needs rng for seeding")
                j = int(rng.integers(pool_live))
                c = int(active_pool[j])
                if matched[c]:
                    pool_live -= 1
                    active_pool[j] = active_pool[pool_live]
                    continue
                stack[int(meta[0])] = c
                meta[0] += 1
                if meta[0] > meta[3]:
                    meta[3] = meta[0]
                seeded = True
                break
            if not seeded:
                concluded = True  # no active unmatched clones remain
                break

        # phase-end bookkeeping
        left_end = _left_counts(cell, boundary, skip=special_clone)
        b_j = int(((left_end == 2) & (left_start - left_end >= 1)).sum())
        ss = int(meta[0])
        while ss > 0 and matched[stack[ss - 1]]:
            ss -= 1
        meta[0] = ss
        a_j = bool(ss > 0 and passive[cell.vertex[stack[ss - 1]]])
        trace.append(
            PhaseStats(
                phase=phase,
                boundary=boundary,
                n_active=n_active,
                light_lower=n_active - h_j,
                matched_active=int(meta[4]),
                b_transitions=b_j,
                stack_depth_max=int(meta[3]),
                ended_on_passive_top=a_j,
            )
        )
        if concluded:
            break
        phase += 1
        left_start = left_end

    # leftover passive cycles: complete with a uniform pairing (plain
    # configuration model on the remaining clones)
    nm = int(meta[2])
    if not stop_at_lambda_c:
        rem = np.nonzero(matched == 0)[0]
        if len(rem):
            if rng is None:
                raise ValueError("completion needs rng")
            perm = rng.permutation(rem)
            for a, b in zip(perm[0::2], perm[1::2]):
                matched[a] = matched[b] = 1
                partner[a], partner[b] = b, a
                mpairs[2 * nm] = a
                mpairs[2 * nm + 1] = b
                mpos[nm] = math.nan
                nm += 1
        completed = True

    if lambda_c is None:
        lambda_c = float(fmeta[0])
        unmatched_snapshot = np.nonzero(matched == 0)[0]

    pairs = mpairs[: 2 * nm].reshape(-1, 2).copy()
    line_driven = mpos[:nm][~np.isnan(mpos[:nm])].copy()
    return ColaResult(
        lam=cell.lam,
        beta=beta,
        lambda_c=lambda_c,
        matching=pairs,
        match_positions=line_driven,
        special_clone=special_clone,
        phase_trace=trace,
        unmatched_at_lambda_c=unmatched_snapshot,
        completed=completed,
        cell=cell,
    )


def lambda_c_invariance_check(cell: LambdaCell, betas, rng_seed: int = 0) -> bool:
    """True iff lambda_c is identical across all given phase fractions."""
    values = []
    for b in betas:
        rng = np.random.default_rng(rng_seed)
        res = run_cola(cell, beta=b, stop_at_lambda_c=True, rng=rng)
        values.append(res.lambda_c)
    return all(v == values[0] for v in values)
