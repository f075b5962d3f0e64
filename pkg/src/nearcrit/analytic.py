"""Fixed-point solvers and probability distributions shared by every model.

The two scalar equations solved here pin down the supercritical regime:
``mu`` is the conjugate of lambda (root < 1 of  mu*e^-mu = lambda*e^-lambda)
and ``theta`` is the survival fraction (positive root of theta = 1 - e^-(theta*lambda)).
They satisfy mu = lambda*(1 - theta) exactly, which doubles as a cross-solver
consistency check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

__all__ = [
    "CapExceededError",
    "ModelParams",
    "RootedTree",
    "borel_pmf",
    "conjugate_mu",
    "sample_geometric",
    "sample_normal",
    "sample_pgw_forest",
    "sample_pgw_tree",
    "sample_poisson",
    "theta_lambda",
]

_LAMBDA_SLACK = 1e-9


class CapExceededError(RuntimeError):
    """A sampler exceeded its node cap (an implausible run, not a logic bug)."""


def conjugate_mu(lam: float) -> float:
    """Unique root mu < 1 of mu*e^-mu = lam*e^-lam, for lam > 1.

    Bracketed bisection to ~1e-13 interval width plus a guarded Newton
    polish; bisection alone guarantees convergence as lam -> 1 where the
    Newton slope (1-mu)e^-mu vanishes.
    """
    if not lam - 1.0 >= _LAMBDA_SLACK:
        raise ValueError(f"conjugate is defined for lambda > 1, got {lam}")
    target = lam * math.exp(-lam)

    def g(m):
        return m * math.exp(-m) - target

    lo, hi = 0.0, 1.0  # g(0) < 0 < g(1) for lam > 1
    while hi - lo > 1e-13:
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if g(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    for _ in range(3):
        slope = (1.0 - x) * math.exp(-x)
        if slope <= 0.0:
            break
        step = g(x) / slope
        cand = x - step
        if not (lo <= cand <= hi) or abs(g(cand)) >= abs(g(x)):
            break
        x = cand
    return x


def theta_lambda(lam: float) -> float:
    """Unique positive root of theta = 1 - e^-(theta*lam), for lam > 1."""
    if not lam - 1.0 >= _LAMBDA_SLACK:
        raise ValueError(f"survival fraction requires lambda > 1, got {lam}")

    def f(t):
        # t - 1 + e^-(lam t), written with expm1 for accuracy near 0
        return t + math.expm1(-lam * t)

    lo, hi = 1e-15, 1.0  # f(lo) < 0 < f(hi)
    while hi - lo > 1e-16:
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if f(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    for _ in range(4):
        slope = 1.0 - lam * math.exp(-lam * x)
        if slope <= 0.0:
            break
        cand = x - f(x) / slope
        if not (lo <= cand <= hi) or abs(f(cand)) >= abs(f(x)):
            break
        x = cand
    return x


@dataclass(frozen=True)
class ModelParams:
    """Analytic constants for one (n, eps) point; single source of truth.

    For the supercritical case (lam > 1) mu and theta come from the solvers;
    the subcritical/critical extension mu = lam, theta = 0 keeps degenerate
    CLI cases (p -> 0) well defined.
    """

    n: int
    eps: float
    lam: float
    p: float
    mu: float
    theta: float

    @classmethod
    def from_eps(cls, n: int, eps: float) -> "ModelParams":
        if n < 1:
            raise ValueError("n must be a positive integer")
        lam = 1.0 + eps
        if lam < 0 or lam / n >= 1.0:
            raise ValueError(f"eps={eps} gives an edge probability outside [0, 1)")
        if lam - 1.0 >= _LAMBDA_SLACK:
            mu = conjugate_mu(lam)
            theta = theta_lambda(lam)
        else:
            mu, theta = lam, 0.0
        return cls(n=n, eps=eps, lam=lam, p=lam / n, mu=mu, theta=theta)

    @classmethod
    def from_p(cls, n: int, p: float) -> "ModelParams":
        if not 0.0 <= p < 1.0:
            raise ValueError(f"p must lie in [0, 1), got {p}")
        return cls.from_eps(n, p * n - 1.0)

    @property
    def supercritical(self) -> bool:
        return self.lam - 1.0 >= _LAMBDA_SLACK

    @property
    def eps3n(self) -> float:
        return self.eps**3 * self.n

    @property
    def eps4n(self) -> float:
        return self.eps**4 * self.n

    def require_supercritical(self) -> None:
        if not self.supercritical:
            raise ValueError("this model requires eps > 0 (lambda > 1)")

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "eps": self.eps,
            "lambda": self.lam,
            "p": self.p,
            "mu": self.mu,
            "theta": self.theta,
        }


@dataclass(frozen=True)
class RootedTree:
    """Rooted tree as a parent array: node 0 is the root, parent[i] < i."""

    parent: np.ndarray

    @property
    def size(self) -> int:
        return len(self.parent)

    def validate(self) -> None:
        if self.size < 1 or self.parent[0] != -1:
            raise ValueError("root must be node 0 with parent -1")
        if self.size > 1:
            idx = np.arange(1, self.size)
            if not ((self.parent[1:] >= 0) & (self.parent[1:] < idx)).all():
                raise ValueError("parents must precede children")


def borel_pmf(gamma: float, t):
    """Borel(gamma) pmf  t^(t-1)/(gamma t!) * (gamma e^-gamma)^t,  t = 1, 2, ...

    Computed in log space (t! overflows past t ~ 170); ``t`` may be an array.
    """
    if not 0.0 < gamma <= 1.0:
        raise ValueError(f"gamma must lie in (0, 1], got {gamma}")
    t_arr = np.asarray(t, dtype=np.float64)
    if t_arr.min() < 1 or not np.array_equal(t_arr, np.floor(t_arr)):
        raise ValueError("t must be a positive integer")
    logp = (
        (t_arr - 1.0) * np.log(t_arr)
        - gammaln(t_arr + 1.0)
        - math.log(gamma)
        + t_arr * (math.log(gamma) - gamma)
    )
    out = np.exp(logp)
    return float(out) if np.ndim(t) == 0 else out


def sample_geometric(q: float, rng: np.random.Generator, size=None):
    """Geometric on {1, 2, ...} with success probability q (mean 1/q)."""
    if not 0.0 < q < 1.0:
        raise ValueError(f"q must lie in (0, 1), got {q}")
    draw = rng.geometric(q, size=size)
    return int(draw) if size is None else draw


def sample_poisson(mean: float, rng: np.random.Generator, size=None):
    if mean < 0:
        raise ValueError(f"Poisson mean must be >= 0, got {mean}")
    draw = rng.poisson(mean, size=size)
    return int(draw) if size is None else draw


def sample_normal(mean: float, var: float, rng: np.random.Generator, size=None):
    if var < 0:
        raise ValueError(f"variance must be >= 0, got {var}")
    draw = rng.normal(mean, math.sqrt(var), size=size)
    return float(draw) if size is None else draw


def sample_pgw_forest(gamma: float, roots: int, rng: np.random.Generator,
                      cap: int = 10**8):
    """``roots`` independent Poisson(gamma) branching trees, grown breadth-first.

    Returns (parent, owner): nodes 0..roots-1 are the roots (parent -1),
    children follow in creation order, owner[i] is the root of node i.
    """
    if not 0.0 <= gamma < 1.0:
        raise ValueError(f"offspring mean must lie in [0, 1), got {gamma}")
    if roots < 0:
        raise ValueError("roots must be >= 0")
    parent_chunks = [np.full(roots, -1, dtype=np.int64)]
    owner_chunks = [np.arange(roots, dtype=np.int64)]
    frontier = np.arange(roots, dtype=np.int64)
    frontier_owner = owner_chunks[0]
    next_id = roots
    while frontier.size:
        counts = rng.poisson(gamma, frontier.size)
        total = int(counts.sum())
        if next_id + total > cap:
            raise CapExceededError(
                f"branching process exceeded the {cap}-node cap"
            )
        if total == 0:
            break
        parent_chunks.append(np.repeat(frontier, counts))
        frontier_owner = np.repeat(frontier_owner, counts)
        owner_chunks.append(frontier_owner)
        frontier = np.arange(next_id, next_id + total, dtype=np.int64)
        next_id += total
    return np.concatenate(parent_chunks), np.concatenate(owner_chunks)


def sample_pgw_tree(gamma: float, rng: np.random.Generator, cap: int = 10**8) -> RootedTree:
    """Family tree of a Poisson(gamma) Galton-Watson process, gamma < 1."""
    if not 0.0 <= gamma < 1.0:
        raise ValueError(f"offspring mean must lie in [0, 1), got {gamma}")
    parent, _ = sample_pgw_forest(gamma, 1, rng, cap=cap)
    return RootedTree(parent=parent)


def pgw_forest_sizes(gamma: float, roots: int, rng: np.random.Generator,
                     cap: int = 10**8) -> np.ndarray:
    """Sizes of ``roots`` independent PGW(gamma) trees (bincount of owners)."""
    _, owner = sample_pgw_forest(gamma, roots, rng, cap=cap)
    return np.bincount(owner, minlength=roots)
