"""Replicated experiments, two-sample statistics and report generation.

Replica i of model slot s draws its whole randomness from the stream
``SeedSequence(seed, spawn_key=(s, i))``, so reports are bit-identical for a
fixed (config, seed) regardless of worker count or scheduling.
"""

from __future__ import annotations

import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.special import chdtrc, kolmogorov

from .analytic import ModelParams
from .decompose import decompose
from .models import ModelKind, sample
from .multigraph import connected_components
from .observables import ObservableRecord, measure

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "ExperimentReport",
    "KsResult",
    "ModelSpec",
    "ReplicaError",
    "chi_square_gof",
    "ks_two_sample",
    "run_experiment",
]

REPORT_VERSION = 1
KNOWN_METRICS = ObservableRecord.field_names()


class ConfigError(ValueError):
    """Invalid experiment or CLI configuration."""


class ReplicaError(RuntimeError):
    def __init__(self, model: str, replica: int, cause: Exception):
        super().__init__(f"model {model}, replica {replica}: {cause}")
        self.replica = replica
        self.cause = cause


@dataclass(frozen=True)
class ModelSpec:
    kind: ModelKind
    n: int
    eps: float | None = None
    p: float | None = None

    def params(self) -> ModelParams:
        if (self.eps is None) == (self.p is None):
            raise ConfigError("exactly one of eps / p must be given")
        if self.eps is not None:
            return ModelParams.from_eps(self.n, self.eps)
        return ModelParams.from_p(self.n, self.p)

    def to_dict(self) -> dict:
        return {"kind": ModelKind(self.kind).value, **self.params().to_dict()}


@dataclass(frozen=True)
class ExperimentConfig:
    model_a: ModelSpec
    model_b: ModelSpec | None = None
    replicas: int = 1
    seed: int = 0
    metrics: tuple = ("component_size", "core_size", "kernel_edges", "max_two_path")
    strict_regime: bool = False
    jobs: int = 1
    distance_pairs: int = 256

    def validate(self) -> None:
        if self.replicas < 1:
            raise ConfigError("replicas must be >= 1")
        if not self.metrics:
            raise ConfigError("metrics must be non-empty")
        unknown = [m for m in self.metrics if m not in KNOWN_METRICS]
        if unknown:
            raise ConfigError(f"unknown metrics: {unknown}")
        self.model_a.params()
        if self.model_b is not None:
            self.model_b.params()

    def to_dict(self) -> dict:
        d = {
            "model_a": self.model_a.to_dict(),
            "replicas": self.replicas,
            "seed": self.seed,
            "metrics": list(self.metrics),
            "strict_regime": self.strict_regime,
            "distance_pairs": self.distance_pairs,
        }
        if self.model_b is not None:
            d["model_b"] = self.model_b.to_dict()
        return d


def _replica_stream(seed: int, slot: int, replica: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(slot, replica)))


def _run_replica(args):
    spec_kind, n, eps, p, seed, slot, replica, metrics, pairs = args
    spec = ModelSpec(kind=ModelKind(spec_kind), n=n, eps=eps, p=p)
    params = spec.params()
    rng = _replica_stream(seed, slot, replica)
    t0 = time.perf_counter()
    try:
        g, _ = sample(spec.kind, params, rng)
        labels = connected_components(g)
        sizes = np.bincount(labels) if g.n else np.array([0])
        # regime flag: a unique component inside [eps n, 4 eps n], none larger
        lo, hi = params.eps * params.n, 4.0 * params.eps * params.n
        in_window = int(((sizes >= lo) & (sizes <= hi)).sum())
        in_regime = bool(in_window == 1 and sizes.max() <= hi) if params.eps > 0 else False
        comp = np.nonzero(labels == int(np.argmax(sizes)))[0]
        d = decompose(g, comp)
        rec = measure(d, metrics, rng, distance_pairs=pairs)
    except Exception as exc:  # noqa: BLE001 - annotated and re-raised
        raise ReplicaError(ModelKind(spec_kind).value, replica, exc) from exc
    wall_ms = (time.perf_counter() - t0) * 1000.0
    return replica, rec.to_dict(), in_regime, wall_ms


def _summaries(records: list[dict], metrics) -> dict:
    out = {}
    for m in metrics:
        vals = np.array([r[m] for r in records if r[m] is not None], dtype=np.float64)
        if len(vals) == 0:
            continue
        out[m] = {
            "mean": float(vals.mean()),
            "sd": float(vals.std(ddof=1)) if len(vals) > 1 else 0.0,
            "min": float(vals.min()),
            "max": float(vals.max()),
            "q25": float(np.quantile(vals, 0.25)),
            "q50": float(np.quantile(vals, 0.50)),
            "q75": float(np.quantile(vals, 0.75)),
        }
    return out


class KsResult(NamedTuple):
    D: float
    p: float
    approx_ties: bool


def ks_two_sample(xs, ys) -> KsResult:
    """Two-sample Kolmogorov-Smirnov test.

    D is the exact sup-distance between the empirical CDFs (evaluated at all
    data points, so ties are handled exactly); the p-value comes from the
    asymptotic Kolmogorov series at effective size |xs||ys|/(|xs|+|ys|) and
    is flagged approximate whenever ties are present.
    """
    xs = np.sort(np.asarray(xs, dtype=np.float64))
    ys = np.sort(np.asarray(ys, dtype=np.float64))
    if len(xs) < 5 or len(ys) < 5:
        raise ValueError("need at least 5 observations per sample")
    grid = np.concatenate([xs, ys])
    fx = np.searchsorted(xs, grid, side="right") / len(xs)
    fy = np.searchsorted(ys, grid, side="right") / len(ys)
    d_stat = float(np.abs(fx - fy).max())
    ne = len(xs) * len(ys) / (len(xs) + len(ys))
    p = float(kolmogorov(math.sqrt(ne) * d_stat))
    ties = len(np.unique(grid)) < len(grid)
    return KsResult(D=d_stat, p=min(1.0, max(0.0, p)), approx_ties=ties)


def chi_square_gof(observed, expected) -> tuple:
    """Pearson goodness-of-fit with trailing-bin merging (expected >= 5)."""
    observed = np.asarray(observed, dtype=np.float64)
    expected = np.asarray(expected, dtype=np.float64)
    if observed.shape != expected.shape:
        raise ValueError("observed/expected must have equal length")
    if abs(observed.sum() - expected.sum()) > 0.5:
        raise ValueError(
            f"totals differ: observed {observed.sum()}, expected {expected.sum()}"
        )
    obs = list(observed)
    exp = list(expected)
    while len(exp) > 1 and exp[-1] < 5.0:
        tail_e = exp.pop()
        exp[-1] += tail_e
        tail_o = obs.pop()
        obs[-1] += tail_o
    obs_a, exp_a = np.array(obs), np.array(exp)
    if (exp_a < 5.0).any():
        raise ValueError("expected counts below 5 after tail merge")
    stat = float(((obs_a - exp_a) ** 2 / exp_a).sum())
    dof = len(exp_a) - 1
    p = float(chdtrc(dof, stat)) if dof > 0 else 1.0
    return stat, p


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    records_a: list
    records_b: list | None
    regime_a: list
    regime_b: list | None
    wall_a: list = field(default_factory=list)
    wall_b: list = field(default_factory=list)

    def _kept(self, records, regime):
        if not self.config.strict_regime:
            return records
        return [r for r, ok in zip(records, regime) if ok]

    def excluded(self) -> dict:
        out = {"a": 0, "b": 0}
        if self.config.strict_regime:
            out["a"] = sum(1 for ok in self.regime_a if not ok)
            if self.regime_b is not None:
                out["b"] = sum(1 for ok in self.regime_b if not ok)
        return out

    def tests(self) -> dict | None:
        if self.records_b is None:
            return None
        kept_a = self._kept(self.records_a, self.regime_a)
        kept_b = self._kept(self.records_b, self.regime_b)
        out = {}
        for m in self.config.metrics:
            xs = [r[m] for r in kept_a if r[m] is not None]
            ys = [r[m] for r in kept_b if r[m] is not None]
            if len(xs) >= 5 and len(ys) >= 5:
                res = ks_two_sample(xs, ys)
                out[m] = {"D": res.D, "p": res.p, "approx_ties": res.approx_ties}
        return out

    def to_dict(self, with_timing: bool = True) -> dict:
        kept_a = self._kept(self.records_a, self.regime_a)
        doc = {
            "version": REPORT_VERSION,
            "config": self.config.to_dict(),
            "model_a": {
                "records": self.records_a,
                "in_regime": self.regime_a,
                "summary": _summaries(kept_a, self.config.metrics),
            },
            "excluded": self.excluded(),
        }
        if self.records_b is not None:
            kept_b = self._kept(self.records_b, self.regime_b)
            doc["model_b"] = {
                "records": self.records_b,
                "in_regime": self.regime_b,
                "summary": _summaries(kept_b, self.config.metrics),
            }
            doc["tests"] = self.tests()
        if with_timing:
            doc["timing"] = {
                "per_replica_ms": {"a": self.wall_a, "b": self.wall_b},
                "total_ms": sum(self.wall_a) + sum(self.wall_b),
            }
        return doc

    def to_json(self, with_timing: bool = True) -> str:
        return json.dumps(self.to_dict(with_timing), sort_keys=True, indent=2) + "\n"

    def to_csv(self) -> str:
        cols = list(ObservableRecord.field_names())
        buf = io.StringIO()
        buf.write("model,replica,in_regime," + ",".join(cols) + "\n")

        def rows(tag, records, regime):
            for i, (rec, ok) in enumerate(zip(records, regime)):
                vals = [
                    "" if rec[c] is None else repr(rec[c]) if isinstance(rec[c], float) else str(rec[c])
                    for c in cols
                ]
                buf.write(f"{tag},{i},{int(ok)}," + ",".join(vals) + "\n")

        rows("a", self.records_a, self.regime_a)
        if self.records_b is not None:
            rows("b", self.records_b, self.regime_b)
        return buf.getvalue()


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    """Sample -> largest component -> decompose -> observe, per replica."""
    config.validate()
    slots = [("a", 0, config.model_a)]
    if config.model_b is not None:
        slots.append(("b", 1, config.model_b))
    tasks = []
    for _, slot, spec in slots:
        for i in range(config.replicas):
            tasks.append(
                (
                    ModelKind(spec.kind).value, spec.n, spec.eps, spec.p,
                    config.seed, slot, i, tuple(config.metrics),
                    config.distance_pairs,
                )
            )
    results: dict[tuple, tuple] = {}
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            for task, res in zip(tasks, pool.map(_run_replica, tasks, chunksize=1)):
                results[(task[5], task[6])] = res
    else:
        for task in tasks:
            results[(task[5], task[6])] = _run_replica(task)

    def collect(slot):
        recs, regime, wall = [], [], []
        for i in range(config.replicas):
            _, rec, ok, ms = results[(slot, i)]
            recs.append(rec)
            regime.append(ok)
            wall.append(ms)
        return recs, regime, wall

    recs_a, reg_a, wall_a = collect(0)
    if config.model_b is not None:
        recs_b, reg_b, wall_b = collect(1)
    else:
        recs_b, reg_b, wall_b = None, None, []
    return ExperimentReport(
        config=config,
        records_a=recs_a,
        records_b=recs_b,
        regime_a=reg_a,
        regime_b=reg_b,
        wall_a=wall_a,
        wall_b=wall_b,
    )
