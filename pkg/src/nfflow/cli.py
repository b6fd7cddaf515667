"""Command-line interface: ``nfflow solve | export | gen | stats``."""

from __future__ import annotations

import argparse
import json
import math
import sys
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path as FsPath

from .branching import FEASIBLE, RCVF_CHOICES, SolveConfig, nf_solve
from .errors import NFFlowError
from .milp import export_mps
from .problems import (
    CspInstance,
    build_csp_standard,
    build_csp_waste_limited,
    format_instance,
    generate_random,
    material_bound,
    parse_instance,
    prepare,
)
from .problems.csp import default_max_waste
from .problems.prepare import NETWORKS

EXIT_OK, EXIT_ERROR, EXIT_FEASIBLE = 0, 1, 2


@dataclass(frozen=True)
class RunConfig:
    problem: str = "csp"
    network: str = "auto"
    family: str | None = None
    levels: int = 10
    rcvf: str = "123"
    time_limit: float | None = None
    seed: int = 0
    output: str | None = None

    def __post_init__(self):
        if self.levels < 1:
            raise ValueError("--levels must be at least 1")
        if self.time_limit is not None and self.time_limit <= 0:
            raise ValueError("--time-limit must be positive")


def _finite(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return x


def load_instance(path: str, problem: str):
    return parse_instance(FsPath(path).read_text(), problem)


def _patterns(prep, report) -> list[dict]:
    if report.improved:
        sols = [(tuple(sorted(prep.decode(prep.net, p), reverse=prep.kind == "csp")), k)
                for p, k in report.incumbent]
    else:
        sols = [(tuple(sorted(b, reverse=prep.kind == "csp")), 1) for b in prep.incumbent]
    acc: Counter = Counter()
    for pat, k in sols:
        acc[pat] += k
    key = "widths" if prep.kind == "csp" else "items"
    return [{key: list(p), "multiplicity": k} for p, k in sorted(acc.items())]


def solve_instance(path: str, cfg: RunConfig, export_path: str | None = None) -> dict:
    inst = load_instance(path, cfg.problem)
    prep = prepare(inst, cfg.network, cfg.family)
    if export_path:
        FsPath(export_path).write_text(export_mps(prep.net, prep.sides))
    config = SolveConfig(levels=cfg.levels, rcvf=cfg.rcvf, time_limit=cfg.time_limit)
    report = nf_solve(prep.net, prep.sides, prep.family, prep.z_ub, config=config, pool=prep.pool)
    value = prep.z_ub if not report.improved else sum(k for _, k in report.incumbent)
    bound = max(material_bound(inst), math.ceil(report.bound) if math.isfinite(report.bound) else 0)
    stats = report.to_json()
    return {
        "instance": path,
        "problem": cfg.problem,
        "network": prep.network,
        "family": prep.family.name,
        "levels": cfg.levels,
        "rcvf": cfg.rcvf,
        "seed": cfg.seed,
        "status": report.status,
        "optimum": report.optimum,
        "incumbent_value": value,
        "heuristic_value": prep.z_ub,
        "bound": bound,
        "patterns": _patterns(prep, report),
        "stats": {k: _finite(v) for k, v in stats.items()},
    }


def network_stats(inst) -> dict:
    out: dict = {}
    if isinstance(inst, CspInstance):
        prep = prepare(inst, "auto")
        std, _ = build_csp_standard(inst)
        lim, _ = build_csp_waste_limited(inst, z_ub=prep.z_ub)
        out["heuristic_value"] = prep.z_ub
        out["max_waste"] = default_max_waste(inst, prep.z_ub)
        out["standard"] = {"nodes": len(std.nodes), "arcs": std.num_live}
        out["waste_limited"] = {"nodes": len(lim.nodes), "arcs": lim.num_live}
    else:
        prep = prepare(inst)
        out["heuristic_value"] = prep.z_ub
        out["ooebpp"] = {"nodes": len(prep.net.nodes), "arcs": prep.net.num_live}
    out["chosen"] = prep.network
    out["side_rows"] = prep.sides.m
    out["mps_rows"] = len(prep.net.nodes) + prep.sides.m
    out["mps_columns"] = prep.net.num_live + 1
    return out


def _dump(obj, out: str | None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if out:
        FsPath(out).write_text(text)
    else:
        sys.stdout.write(text)


def _run_one(args):
    path, cfg, export = args
    try:
        return solve_instance(path, cfg, export)
    except (OSError, NFFlowError, ValueError) as exc:
        return {"instance": path, "status": "Error", "error": str(exc)}


def cmd_solve(paths: list[str], cfg: RunConfig, jobs: int = 1, export_path: str | None = None) -> int:
    if export_path and len(paths) > 1:
        raise ValueError("--export-mps takes a single instance")
    tasks = [(p, cfg, export_path) for p in paths]
    if jobs > 1 and len(paths) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_one, tasks))
    else:
        results = [_run_one(t) for t in tasks]
    for r in results:
        if r["status"] == "Error":
            print(f"nfflow: {r['instance']}: {r['error']}", file=sys.stderr)
    _dump(results[0] if len(results) == 1 else results, cfg.output)
    statuses = {r["status"] for r in results}
    if "Error" in statuses:
        return EXIT_ERROR
    if FEASIBLE in statuses:
        return EXIT_FEASIBLE
    return EXIT_OK


def cmd_export(path: str, cfg: RunConfig, out: str) -> int:
    prep = prepare(load_instance(path, cfg.problem), cfg.network, cfg.family)
    FsPath(out).write_text(export_mps(prep.net, prep.sides))
    return EXIT_OK


def cmd_gen(kind: str, n: int, W: int, weights, demands, seed: int, out: str | None) -> int:
    inst = generate_random("ooebpp" if kind == "ooebpp" else "csp", n, W, tuple(weights), tuple(demands), seed)
    text = format_instance(inst, kind)
    if out:
        FsPath(out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_stats(path: str, cfg: RunConfig) -> int:
    _dump(network_stats(load_instance(path, cfg.problem)), cfg.output)
    return EXIT_OK


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--problem", choices=("bpp", "csp", "ooebpp"), default="csp",
                   help="instance format / problem kind (default: csp)")
    p.add_argument("--network", choices=NETWORKS, default="auto",
                   help="CSP network: standard, waste-limited or the smaller of both (default)")
    p.add_argument("--family", default=None,
                   help="arc family: fa:k, fb:k, singleton, tail-node (default: fa:1 for CSP, singleton for OOEBPP)")
    p.add_argument("--json", dest="output", metavar="OUT", default=None, help="write the JSON report to OUT")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nfflow", description="Exact arc-flow solver for bin packing problems.")
    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="solve one or more instances to optimality")
    s.add_argument("instances", nargs="+")
    _common(s)
    s.add_argument("--levels", type=int, default=10, help="branching levels K (default: 10)")
    s.add_argument("--rcvf", choices=RCVF_CHOICES, default="123", help="fixing strategies to apply (default: 123)")
    s.add_argument("--time-limit", type=float, default=None, help="seconds per instance")
    s.add_argument("--seed", type=int, default=0, help="recorded in the report; the solver is deterministic")
    s.add_argument("--jobs", type=int, default=1, help="instances solved in parallel")
    s.add_argument("--export-mps", metavar="PATH", default=None, help="also write the arc-flow model as MPS")

    e = sub.add_parser("export", help="write the arc-flow model in MPS format")
    e.add_argument("instance")
    _common(e)
    e.add_argument("--export-mps", "-o", dest="mps", metavar="PATH", required=True)

    g = sub.add_parser("gen", help="generate a random instance")
    g.add_argument("--kind", choices=("bpp", "csp", "ooebpp"), default="csp")
    g.add_argument("-n", type=int, required=True, help="number of items")
    g.add_argument("-W", type=int, required=True, help="capacity")
    g.add_argument("--weights", type=int, nargs=2, metavar=("LO", "HI"), required=True)
    g.add_argument("--demands", type=int, nargs=2, metavar=("LO", "HI"), default=(1, 1))
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--out", default=None)

    t = sub.add_parser("stats", help="node and arc counts of the available networks")
    t.add_argument("instance")
    _common(t)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "gen":
            return cmd_gen(args.kind, args.n, args.W, args.weights, args.demands, args.seed, args.out)
        family = args.family
        if args.command == "solve":
            cfg = RunConfig(args.problem, args.network, family, args.levels, args.rcvf,
                            args.time_limit, args.seed, args.output)
            return cmd_solve(args.instances, cfg, args.jobs, args.export_mps)
        cfg = RunConfig(args.problem, args.network, family, output=args.output)
        if args.command == "export":
            return cmd_export(args.instance, cfg, args.mps)
        return cmd_stats(args.instance, cfg)
    except (OSError, NFFlowError, ValueError) as exc:
        print(f"nfflow: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
