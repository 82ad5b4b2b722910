"""Command-line front end.

Exit codes: 0 ok, 1 configuration is not a fixed point (``validate``),
2 infeasible, 3 timeout, 64 usage error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import bench
from .dynamics import is_fixed_point
from .exact import OPTIMAL, TIMEOUT, build_ilp, export_lp, solve_exact
from .reductions import DEFAULT_BETA_CAP, build_clique_reduction, build_mvc_reduction
from .system import (
    build_system,
    hamming_weight,
    read_edge_list,
    read_thresholds,
    support,
    write_edge_list,
    write_thresholds,
)

EXIT_OK, EXIT_NOT_FIXED, EXIT_INFEASIBLE, EXIT_TIMEOUT, EXIT_USAGE = 0, 1, 2, 3, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_instance_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--edges", required=True, help="edge-list file")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--thresholds", help="threshold file ('vertex threshold' lines)")
    g.add_argument("--random-thresholds", type=int, metavar="SEED",
                   help="random thresholds in [3, deg+1] from SEED")
    g.add_argument("--uniform", type=int, metavar="TAU", help="uniform threshold TAU")
    p.add_argument("--directed", action="store_true")


def _load(args):
    edges, mapping = read_edge_list(args.edges)
    if args.thresholds:
        tau = read_thresholds(args.thresholds, mapping)
    else:
        deg = bench._degrees(len(mapping), edges)
        if args.random_thresholds is not None:
            tau = bench.assign_random_thresholds(deg, args.random_thresholds)
        else:
            tau = bench.assign_uniform_thresholds(deg, args.uniform)
    labels = [None] * len(mapping)
    for tok, i in mapping.items():
        labels[i] = tok
    return build_system(edges, tau, directed=args.directed), labels


def _emit(payload: dict) -> None:
    json.dump(payload, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")


def cmd_solve(args) -> int:
    sys_, labels = _load(args)
    rep = bench.run_method(sys_, args.method, args.seed)
    _emit({
        "method": rep.method, "status": rep.status, "weight": rep.weight,
        "valid": rep.valid, "runtime_ms": round(1000 * rep.runtime, 3), "seed": rep.seed,
        "state1": [labels[v] for v in support(rep.config)] if rep.config is not None else None,
    })
    return EXIT_OK if rep.status == "ok" else EXIT_INFEASIBLE


def cmd_exact(args) -> int:
    sys_, labels = _load(args)
    res = solve_exact(sys_, time_budget=args.time_budget, node_budget=args.node_budget)
    cert = None
    if res.config is not None:
        assert is_fixed_point(sys_, res.config)
        cert = [labels[v] for v in support(res.config)]
    _emit({"status": res.status, "opt" if res.optimal else "best": res.weight,
           "certificate": cert, "nodes": res.nodes, "elapsed_s": round(res.elapsed, 6)})
    if res.status == OPTIMAL:
        return EXIT_OK
    return EXIT_TIMEOUT if res.status == TIMEOUT else EXIT_INFEASIBLE


def cmd_export_lp(args) -> int:
    sys_, _ = _load(args)
    model = build_ilp(sys_)
    if args.out:
        with open(args.out, "w") as fh:
            export_lp(model, fh)
    else:
        export_lp(model, sys.stdout)
    return EXIT_OK


def _write_instance(prefix: str, sys_, roles=None, meta=None) -> None:
    base = Path(prefix)
    base.parent.mkdir(parents=True, exist_ok=True)
    with open(f"{prefix}.edges", "w") as fh:
        write_edge_list(sys_, fh)
    with open(f"{prefix}.thresholds", "w") as fh:
        write_thresholds(sys_, fh)
    if roles is not None:
        Path(f"{prefix}.roles.json").write_text(json.dumps(meta, indent=2) + "\n")


def cmd_gen_gnp(args) -> int:
    edges = bench.generate_gnp(args.n, args.p, args.seed)
    deg = bench._degrees(args.n, edges)
    if args.uniform is not None:
        tau = bench.assign_uniform_thresholds(deg, args.uniform)
    else:
        tau = bench.assign_random_thresholds(deg, args.threshold_seed)
    _write_instance(args.out, build_system(edges, tau))
    return EXIT_OK


def _source_graph(path):
    edges, mapping = read_edge_list(path)
    return len(mapping), edges


def cmd_gen_mvc(args) -> int:
    n, edges = _source_graph(args.graph)
    sys_, spec = build_mvc_reduction(n, edges, args.k, args.epsilon, beta_cap=args.beta_cap)
    _write_instance(args.out, sys_, spec.roles, spec.to_json())
    return EXIT_OK


def cmd_gen_clique(args) -> int:
    n, edges = _source_graph(args.graph)
    sys_, spec = build_clique_reduction(n, edges, args.k)
    _write_instance(args.out, sys_, spec.roles, spec.to_json())
    return EXIT_OK


def cmd_bench(args) -> int:
    kv = bench.read_config(args.config) if args.config else {}
    for item in args.set or []:
        if "=" not in item:
            raise UsageError(f"--set expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        kv[k.strip()] = v.strip()
    try:
        spec = bench.ExperimentSpec.from_mapping(kv)
        spec.validate()
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    report = bench.run_experiment(spec)
    csv_path, json_path = bench.write_report(report, args.out)
    _emit({"csv": str(csv_path), "json": str(json_path), "summary": report.summary})
    return EXIT_OK


def cmd_validate(args) -> int:
    sys_, labels = _load(args)
    index = {tok: i for i, tok in enumerate(labels)}
    on = []
    for raw in Path(args.config).read_text().split("\n"):
        tok = raw.strip()
        if not tok or tok.startswith("#"):
            continue
        if tok not in index:
            raise UsageError(f"unknown vertex token {tok!r} in configuration")
        on.append(index[tok])
    c = sys_.config_from_set(on)
    ok = is_fixed_point(sys_, c)
    _emit({"fixed_point": ok, "weight": hamming_weight(c), "nontrivial": bool(c.any())})
    return EXIT_OK if ok else EXIT_NOT_FIXED


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nminfpe", description="Nontrivial minimum fixed points of threshold systems")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="run one heuristic or baseline")
    _add_instance_args(p)
    p.add_argument("--method", default="greedy_np", choices=sorted(bench.METHODS))
    p.add_argument("--seed", type=int, default=0, help="RNG seed (random baseline)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("exact", help="optimal weight with certificate")
    _add_instance_args(p)
    p.add_argument("--time-budget", type=float, default=60.0)
    p.add_argument("--node-budget", type=int, default=None)
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("export-lp", help="write the 0/1 program in LP format")
    _add_instance_args(p)
    p.add_argument("--out", help="output path (default stdout)")
    p.set_defaults(func=cmd_export_lp)

    gen = sub.add_parser("gen", help="instance generators")
    gsub = gen.add_subparsers(dest="generator", required=True, parser_class=_Parser)
    g = gsub.add_parser("gnp", help="Erdos-Renyi graph with thresholds")
    g.add_argument("-n", type=int, required=True)
    g.add_argument("-p", type=float, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--threshold-seed", type=int, default=0)
    g.add_argument("--uniform", type=int, default=None)
    g.add_argument("--out", required=True, help="output prefix")
    g.set_defaults(func=cmd_gen_gnp)

    g = gsub.add_parser("reduce-mvc", help="vertex-cover reduction instance")
    g.add_argument("--graph", required=True, help="source edge list")
    g.add_argument("-k", type=int, required=True)
    g.add_argument("--epsilon", type=float, required=True)
    g.add_argument("--beta-cap", type=int, default=DEFAULT_BETA_CAP)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen_mvc)

    g = gsub.add_parser("reduce-clique", help="clique reduction instance")
    g.add_argument("--graph", required=True)
    g.add_argument("-k", type=int, required=True)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen_clique)

    p = sub.add_parser("bench", help="run an experiment spec")
    p.add_argument("--config", help="flat key = value file")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config key")
    p.add_argument("--out", default="bench_output")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("validate", help="check a configuration file against a system")
    _add_instance_args(p)
    p.add_argument("--config", required=True, help="file listing state-1 vertex tokens")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"nminfpe: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError) as exc:
        print(f"nminfpe: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
