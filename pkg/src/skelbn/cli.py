"""Command-line entry point.

Subcommands: ``learn`` (structure learning to an edge list + DOT export),
``sample`` (draw cases from a network file), ``xval`` (cross-validated KL
per strategy), ``compare`` (sample-size sweep of strategies against a
ground-truth network), and ``gen`` (random ground-truth network files).

Every command writes a JSON run manifest next to its outputs: the resolved
configuration, seed, input digests, version, and wall-clock duration.
Re-running the recorded argv with the deterministic completion policy
reproduces the outputs byte for byte. Reports are JSON-lines records with
sorted keys.

Exit codes: 0 success, 2 usage error, 3 input validation error, 4 internal
iteration bound exceeded.
"""
from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import __version__
from .bn import cross_validate, load_network, random_network, sample, save_network
from .dataset import load_csv, save_schema, write_csv
from .errors import InputError, InternalBoundError
from .graph import structural_errors, to_dot, to_edge_list_text
from .scores import ScoreCache, ScoreConfig
from .search import SearchConfig, run_search
from .util import as_rng, file_digest


class UsageError(Exception):
    pass


_STRATEGY_NAMES = {"skeleton": "skeleton", "hillclimb": "local", "local": "local", "k2": "k2"}


def _add_score_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--criterion", choices=("bic", "bdeu"), default="bic")
    p.add_argument("--ess", type=float, default=5.0, help="equivalent sample size N'")
    p.add_argument("--alpha", type=float, default=0.0, help="log edge prior per edge")
    p.add_argument("--gamma", type=float, default=6.0, help="collider acceptance threshold")
    p.add_argument("--edge-threshold", type=float, default=None,
                   help="edge inclusion/elimination threshold (default gamma/2)")


def _add_search_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--max-iterations", type=int, default=200)
    p.add_argument("--history-window", type=int, default=10)
    p.add_argument("--completion", choices=("random", "deterministic"), default="random")
    p.add_argument("--max-parents", type=int, default=None)


def _score_config(args) -> ScoreConfig:
    return ScoreConfig(
        criterion=args.criterion,
        ess=args.ess,
        alpha=args.alpha,
        gamma=args.gamma,
        edge_threshold=args.edge_threshold,
    )


def _search_config(args, strategy: str, ordering=None) -> SearchConfig:
    return SearchConfig(
        strategy=strategy,
        history_window=args.history_window,
        max_iterations=args.max_iterations,
        ordering=ordering,
        max_parents=args.max_parents,
        completion=args.completion,
    )


def _parse_ordering(text: str, schema) -> tuple[int, ...]:
    items = [s.strip() for s in text.split(",") if s.strip()]
    out = []
    for item in items:
        if item.isdigit():
            out.append(int(item))
        else:
            try:
                out.append(schema.index_of(item))
            except KeyError:
                raise UsageError(f"--ordering: unknown variable {item!r}") from None
    if sorted(out) != list(range(schema.n)):
        raise UsageError("--ordering must be a permutation of all variables")
    return tuple(out)


def _write_manifest(path, command, args, inputs, started, outputs) -> None:
    manifest = {
        "command": command,
        "config": _args_dict(args),
        "argv": getattr(args, "_argv", None),
        "inputs": {str(p): file_digest(p) for p in inputs},
        "outputs": [str(p) for p in outputs],
        "version": __version__,
        "duration_s": round(time.perf_counter() - started, 6),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _jsonl(rows) -> str:
    return "".join(json.dumps(r, sort_keys=True) + "\n" for r in rows)


def _cmd_learn(args) -> int:
    started = time.perf_counter()
    data = load_csv(args.data, schema_file=args.schema)
    strategy = _STRATEGY_NAMES[args.strategy]
    ordering = None
    if strategy == "k2":
        if args.ordering is None:
            raise UsageError("--strategy k2 requires --ordering")
        ordering = _parse_ordering(args.ordering, data.schema)
    config = _score_config(args)
    sc = _search_config(args, strategy, ordering)
    trace = (lambda line: print("trace:", line, file=sys.stderr)) if args.trace else None
    result = run_search(data, config, sc, rng=as_rng(args.seed), cache=ScoreCache(), trace=trace)

    out = args.out
    edges_path = out + ".edges.txt"
    dot_path = out + ".dot"
    report_path = out + ".report.jsonl"
    with open(edges_path, "w", encoding="utf-8") as fh:
        fh.write(to_edge_list_text(result.dag, data.schema))
    with open(dot_path, "w", encoding="utf-8") as fh:
        fh.write(to_dot(result.dag, data.schema))
    rows = [
        {
            "type": "learn",
            "strategy": args.strategy,
            "score": result.score,
            "edges": result.dag.edge_count,
            "iterations": result.iterations,
            "oscillation": result.oscillation_detected,
            "hit_max_iterations": result.hit_max_iterations,
        }
    ]
    for it, score, edge_count in result.history:
        rows.append({"type": "cycle", "iteration": it, "score": score, "edge_count": edge_count})
    with open(report_path, "w", encoding="utf-8") as fh:
        fh.write(_jsonl(rows))
    _write_manifest(
        out + ".manifest.json", "learn", args, [args.data], started,
        [edges_path, dot_path, report_path],
    )
    print(f"learned {result.dag.edge_count} edges, score {result.score:.6f} "
          f"({result.iterations} iterations)")
    return 0


def _cmd_sample(args) -> int:
    started = time.perf_counter()
    net = load_network(args.net)
    data = sample(net, args.n, rng=as_rng(args.seed))
    csv_path = args.out + ".csv"
    schema_path = args.out + ".schema"
    write_csv(data, csv_path)
    save_schema(net.schema, schema_path)
    _write_manifest(args.out + ".manifest.json", "sample", args, [args.net],
                    started, [csv_path, schema_path])
    print(f"wrote {args.n} rows over {net.schema.n} variables to {csv_path}")
    return 0


def _cmd_xval(args) -> int:
    started = time.perf_counter()
    data = load_csv(args.data, schema_file=args.schema)
    if data.n_rows < args.folds:
        raise InputError(f"{data.n_rows} rows cannot be split into {args.folds} folds")
    config = _score_config(args)
    strategies = [s.strip() for s in args.strategies.split(",") if s.strip()]
    for s in strategies:
        if s not in _STRATEGY_NAMES:
            raise UsageError(f"unknown strategy {s!r}")
    rows = []
    for s in strategies:
        internal = _STRATEGY_NAMES[s]
        if internal == "k2" and args.ordering is None:
            raise UsageError("k2 in --strategies requires --ordering")
        ordering = _parse_ordering(args.ordering, data.schema) if internal == "k2" else None
        sc = _search_config(args, internal, ordering)
        report = cross_validate(data, config, sc, folds=args.folds, rng=as_rng(args.seed))
        rows.append(
            {
                "type": "xval",
                "strategy": s,
                "folds": args.folds,
                "kl_values": list(report.kl_values),
                "kl_mean": report.kl_mean,
                "kl_std": report.kl_std,
                "edge_counts": list(report.edge_counts),
            }
        )
        print(f"{s}: KL {report.kl_mean:.6f} +- {report.kl_std:.6f} "
              f"(edges per fold: {list(report.edge_counts)})")
    report_path = args.out + ".xval.jsonl"
    with open(report_path, "w", encoding="utf-8") as fh:
        fh.write(_jsonl(rows))
    _write_manifest(args.out + ".manifest.json", "xval", args, [args.data],
                    started, [report_path])
    return 0


def _cmd_compare(args) -> int:
    started = time.perf_counter()
    truth = load_network(args.net)
    sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    strategies = [s.strip() for s in args.strategies.split(",") if s.strip()]
    for s in strategies:
        if s not in _STRATEGY_NAMES:
            raise UsageError(f"unknown strategy {s!r}")
    config = _score_config(args)
    ordering = tuple(truth.dag.topological_order())
    master = as_rng(args.seed)
    run_seeds = [int(x) for x in master.integers(0, 2**63 - 1, size=args.seeds)]
    detail = []
    for size in sizes:
        for rep, run_seed in enumerate(run_seeds):
            rng = as_rng(run_seed)
            data = sample(truth, size, rng=rng)
            for s in strategies:
                internal = _STRATEGY_NAMES[s]
                sc = _search_config(args, internal, ordering if internal == "k2" else None)
                result = run_search(data, config, sc, rng=as_rng(run_seed + 1), cache=ScoreCache())
                errs = structural_errors(result.dag, truth.dag)
                detail.append(
                    {
                        "type": "compare_run", "size": size, "rep": rep, "strategy": s,
                        "score": result.score, "edges": result.dag.edge_count, **errs,
                    }
                )
    rows = list(detail)
    baseline = strategies[0]
    for size in sizes:
        for s in strategies:
            runs = [r for r in detail if r["size"] == size and r["strategy"] == s]
            base = [r for r in detail if r["size"] == size and r["strategy"] == baseline]
            diffs = [r["score"] - b["score"] for r, b in zip(runs, base)]
            rows.append(
                {
                    "type": "compare_agg", "size": size, "strategy": s, "baseline": baseline,
                    "mean_score": float(np.mean([r["score"] for r in runs])),
                    "mean_log_score_diff": float(np.mean(diffs)),
                    "mean_missing": float(np.mean([r["missing"] for r in runs])),
                    "mean_extra": float(np.mean([r["extra"] for r in runs])),
                    "mean_misoriented": float(np.mean([r["misoriented"] for r in runs])),
                }
            )
            print(f"size {size} {s}: mean score {rows[-1]['mean_score']:.3f}, "
                  f"log-score diff vs {baseline} {rows[-1]['mean_log_score_diff']:.3f}")
    report_path = args.out + ".compare.jsonl"
    with open(report_path, "w", encoding="utf-8") as fh:
        fh.write(_jsonl(rows))
    _write_manifest(args.out + ".manifest.json", "compare", args, [args.net],
                    started, [report_path])
    return 0


def _cmd_gen(args) -> int:
    started = time.perf_counter()
    lo, hi = (int(x) for x in args.arity.split(","))
    if args.edges > args.nodes * (args.nodes - 1) // 2:
        raise InputError(
            f"{args.edges} edges infeasible for {args.nodes} nodes"
        )
    net = random_network(
        args.nodes, args.edges, arity_range=(lo, hi), rng=as_rng(args.seed),
        concentration=args.concentration,
    )
    save_network(net, args.out)
    _write_manifest(args.out + ".manifest.json", "gen", args, [], started, [args.out])
    print(f"wrote {args.nodes}-node, {args.edges}-edge network to {args.out}")
    return 0


def _args_dict(args) -> dict:
    return {k: v for k, v in vars(args).items() if k not in ("func", "_argv")}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="skelbn",
                                     description="Structure learning for discrete Bayesian networks")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("learn", help="learn a structure from CSV data")
    p.add_argument("data")
    p.add_argument("--out", required=True, help="output path prefix")
    p.add_argument("--schema", default=None, help="schema sidecar file")
    p.add_argument("--strategy", choices=("skeleton", "hillclimb", "k2"), default="skeleton")
    p.add_argument("--ordering", default=None, help="comma-separated node order for k2")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trace", action="store_true", help="print orientation events to stderr")
    _add_score_flags(p)
    _add_search_flags(p)
    p.set_defaults(func=_cmd_learn)

    p = sub.add_parser("sample", help="sample cases from a network file")
    p.add_argument("net")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output path prefix")
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("xval", help="cross-validated KL per strategy")
    p.add_argument("data")
    p.add_argument("--out", required=True)
    p.add_argument("--schema", default=None)
    p.add_argument("--strategies", default="skeleton,hillclimb")
    p.add_argument("--ordering", default=None)
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    _add_score_flags(p)
    _add_search_flags(p)
    p.set_defaults(func=_cmd_xval)

    p = sub.add_parser("compare", help="sweep sample sizes against a ground-truth network")
    p.add_argument("net")
    p.add_argument("--out", required=True)
    p.add_argument("--sizes", default="500,2000,5000")
    p.add_argument("--strategies", default="skeleton,k2")
    p.add_argument("--seeds", type=int, default=5, help="number of repetitions per size")
    p.add_argument("--seed", type=int, default=0)
    _add_score_flags(p)
    _add_search_flags(p)
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("gen", help="generate a random ground-truth network file")
    p.add_argument("--nodes", type=int, required=True)
    p.add_argument("--edges", type=int, required=True)
    p.add_argument("--arity", default="2,2", help="min,max arity")
    p.add_argument("--concentration", type=float, default=1.0,
                   help="Dirichlet concentration for CPT rows")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output network file path")
    p.set_defaults(func=_cmd_gen)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    effective_argv = list(argv) if argv is not None else sys.argv[1:]
    try:
        args = parser.parse_args(argv)
        args._argv = effective_argv
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 3
    except InternalBoundError as exc:
        print(f"internal bound exceeded: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
