"""Command-line front end.

Exit codes: 0 ok, 1 selftest failure, 2 config error, 3 parse error,
4 replica failure.  Every run echoes its resolved configuration (including
the derived mu and theta) into the output so analytic constants stay
auditable.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .analytic import ModelParams
from .cola import default_beta, generate_cell, run_cola
from .harness import (
    ConfigError,
    ExperimentConfig,
    ModelSpec,
    ReplicaError,
    run_experiment,
)
from .models import ModelKind, sample
from .multigraph import EdgeListParseError, deserialize, largest_component, serialize
from .decompose import decompose
from .observables import ObservableRecord, measure

EXIT_OK = 0
EXIT_SELFTEST = 1
EXIT_CONFIG = 2
EXIT_PARSE = 3
EXIT_RUNTIME = 4

MODEL_NAMES = [k.value for k in ModelKind]


def _open_out(path: str):
    if path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline="\n"), True


def _emit(path: str, text: str) -> None:
    f, own = _open_out(path)
    try:
        f.write(text)
    finally:
        if own:
            f.close()


def _params_from_flags(n: int, eps, p) -> ModelParams:
    if (eps is None) == (p is None):
        raise ConfigError("exactly one of --eps / --p is required")
    if eps is not None:
        return ModelParams.from_eps(n, eps)
    return ModelParams.from_p(n, p)


def _echo_config(command: str, resolved: dict) -> None:
    # pinned output formats cannot carry the config, so the resolved values
    # go to stderr where scripts can still log them
    print(f"# {command} config: {json.dumps(resolved, sort_keys=True)}",
          file=sys.stderr)


def _cmd_gen(args) -> int:
    params = _params_from_flags(args.n, args.eps, args.p)
    _echo_config("gen", {"model": args.model, "seed": args.seed,
                         **params.to_dict()})
    rng = np.random.default_rng(args.seed)
    g, _ = sample(ModelKind(args.model), params, rng)
    f, own = _open_out(args.out)
    try:
        serialize(g, f)
    finally:
        if own:
            f.close()
    return EXIT_OK


def _cmd_decompose(args) -> int:
    g = deserialize(args.infile)
    _echo_config("decompose", {"in": args.infile, "n": g.n, "m": g.m})
    d = decompose(g)
    if args.format == "json":
        _emit(args.out, json.dumps(d.summary(), sort_keys=True, indent=2) + "\n")
    else:
        s = d.summary()
        cols = ["core_size", "stripped_cycle_vertex_count", "kernel_vertices",
                "kernel_edges", "max_path_length", "bush_size_max"]
        row = [
            s["core_size"],
            sum(s["stripped_cycle_lengths"]),
            s["kernel_vertices"],
            s["kernel_edges"],
            max(s["path_lengths"], default=0),
            max(s["bush_sizes"], default=0),
        ]
        _emit(args.out, ",".join(cols) + "\n" + ",".join(map(str, row)) + "\n")
    return EXIT_OK


def _cmd_cola(args) -> int:
    if args.n < 1:
        raise ConfigError("--n must be >= 1")
    if args.lam < 0:
        raise ConfigError("--lambda must be >= 0")
    if args.beta is not None and not 0.0 < args.beta < 1.0:
        raise ConfigError("--beta must lie in (0, 1)")
    if args.replicas < 1:
        raise ConfigError("--replicas must be >= 1")
    lambda_cs = []
    trace_text = None
    for i in range(args.replicas):
        rng = np.random.default_rng(np.random.SeedSequence(args.seed, spawn_key=(0, i)))
        cell = generate_cell(args.n, args.lam, rng)
        res = run_cola(cell, beta=args.beta, stop_at_lambda_c=not args.full, rng=rng)
        lambda_cs.append(res.lambda_c)
        if i == 0 and args.trace:
            trace_text = res.trace_csv()
    if trace_text is not None:
        _emit(args.trace, trace_text)
    arr = np.array(lambda_cs)
    doc = {
        "config": {
            "n": args.n,
            "lambda": args.lam,
            "beta": args.beta if args.beta is not None else default_beta(args.lam),
            "replicas": args.replicas,
            "seed": args.seed,
            "full": bool(args.full),
        },
        "lambda_c": lambda_cs,
        "mean": float(arr.mean()),
        "sd": float(arr.std(ddof=1)) if len(arr) > 1 else 0.0,
    }
    _emit(args.out, json.dumps(doc, sort_keys=True, indent=2) + "\n")
    return EXIT_OK


def _cmd_observe(args) -> int:
    g = deserialize(args.infile)
    metrics = tuple(args.metrics.split(","))
    unknown = [m for m in metrics if m not in ObservableRecord.field_names()]
    if unknown:
        raise ConfigError(f"unknown metrics: {unknown}")
    _echo_config("observe", {"in": args.infile, "seed": args.seed,
                             "metrics": list(metrics)})
    rng = np.random.default_rng(args.seed)
    comp = largest_component(g)
    d = decompose(g, comp)
    rec = measure(d, metrics, rng)
    if args.format == "json":
        _emit(args.out, json.dumps(rec.to_dict(), sort_keys=True, indent=2) + "\n")
    else:
        cols = ObservableRecord.field_names()
        vals = ["" if rec.to_dict()[c] is None else str(rec.to_dict()[c]) for c in cols]
        _emit(args.out, ",".join(cols) + "\n" + ",".join(vals) + "\n")
    return EXIT_OK


def _cmd_compare(args) -> int:
    metrics = tuple(args.metrics.split(","))
    config = ExperimentConfig(
        model_a=ModelSpec(kind=ModelKind(args.model_a), n=args.n, eps=args.eps),
        model_b=(
            ModelSpec(kind=ModelKind(args.model_b), n=args.n, eps=args.eps)
            if args.model_b
            else None
        ),
        replicas=args.replicas,
        seed=args.seed,
        metrics=metrics,
        strict_regime=args.strict_regime,
        jobs=args.jobs if args.jobs is not None else (os.cpu_count() or 1),
    )
    report = run_experiment(config)
    if args.format == "json":
        _emit(args.out, report.to_json())
    else:
        _emit(args.out, report.to_csv())
    return EXIT_OK


def _cmd_selftest(args) -> int:
    from .selftest import run_all

    results = run_all(quick=args.quick)
    width = max(len(r.name) for r in results)
    all_ok = True
    for r in results:
        status = "pass" if r.ok else "FAIL"
        print(f"{r.name:<{width}}  {status}  {r.seconds:7.2f}s  {r.detail}")
        all_ok &= r.ok
    print("selftest:", "pass" if all_ok else "FAIL")
    return EXIT_OK if all_ok else EXIT_SELFTEST


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="nearcrit",
        description="Near-critical random graphs: samplers, dissection, statistics.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="sample a graph and write its edge list")
    g.add_argument("--model", required=True, choices=MODEL_NAMES)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--eps", type=float)
    g.add_argument("--p", type=float)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", default="-")
    g.set_defaults(func=_cmd_gen)

    d = sub.add_parser("decompose", help="dissect the largest component of an edge list")
    d.add_argument("--in", dest="infile", required=True)
    d.add_argument("--out", default="-")
    d.add_argument("--format", choices=["json", "csv"], default="json")
    d.set_defaults(func=_cmd_decompose)

    c = sub.add_parser("cola", help="run the cut-off line algorithm on fresh cells")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--lambda", dest="lam", type=float, required=True)
    c.add_argument("--beta", type=float, default=None)
    c.add_argument("--replicas", type=int, default=1)
    c.add_argument("--trace", default=None, help="write replica 0's phase trace CSV here")
    c.add_argument("--full", action="store_true", help="complete the matching")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--out", default="-")
    c.set_defaults(func=_cmd_cola)

    o = sub.add_parser("observe", help="measure observables on an edge list")
    o.add_argument("--in", dest="infile", required=True)
    o.add_argument("--metrics", default="component_size,core_size,kernel_edges,max_two_path")
    o.add_argument("--seed", type=int, default=0)
    o.add_argument("--out", default="-")
    o.add_argument("--format", choices=["json", "csv"], default="json")
    o.set_defaults(func=_cmd_observe)

    cp = sub.add_parser("compare", help="replicated experiment, optionally two models")
    cp.add_argument("--model-a", required=True, choices=MODEL_NAMES)
    cp.add_argument("--model-b", default=None, choices=MODEL_NAMES)
    cp.add_argument("--n", type=int, required=True)
    cp.add_argument("--eps", type=float, required=True)
    cp.add_argument("--replicas", type=int, default=10)
    cp.add_argument("--metrics", default="component_size,core_size,kernel_edges,max_two_path")
    cp.add_argument("--strict-regime", action="store_true")
    cp.add_argument("--seed", type=int, default=0)
    cp.add_argument("--jobs", type=int, default=None,
                    help="worker processes (default: machine parallelism)")
    cp.add_argument("--out", default="-")
    cp.add_argument("--format", choices=["json", "csv"], default="json")
    cp.set_defaults(func=_cmd_compare)

    st = sub.add_parser("selftest", help="run the exhaustive-oracle suites")
    st.add_argument("--quick", action="store_true")
    st.set_defaults(func=_cmd_selftest)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        if isinstance(exc, EdgeListParseError):
            print(f"parse error: {exc}", file=sys.stderr)
            return EXIT_PARSE
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ReplicaError as exc:
        print(f"replica failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
