"""Command-line interface: graph/data generation, discovery, evaluation, and
benchmark orchestration.

Exit codes: 0 success, 1 run failure (pipeline raised), 2 input error
(unreadable files, malformed values).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import asdict

import numpy as np
from scipy import stats

from . import __version__
from .data import (discretize, load_csv, save_csv, simulate_categorical,
                   simulate_linear_gaussian, simulate_nonlinear)
from .errors import GlideError
from .graphs import Dag, gen_random_dag
from .invariance import GlideConfig, glide
from .metrics import metric_report


def _write_manifest(out_path, command, config, inputs, seed):
    manifest = {
        "command": command,
        "config": config,
        "inputs": inputs,
        "output": str(out_path),
        "seed": seed,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S"),
        "version": __version__,
    }
    with open(f"{out_path}.manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _config_from_args(args) -> GlideConfig:
    """flags > config file > defaults."""
    base = {}
    if getattr(args, "config", None):
        with open(args.config) as fh:
            base = json.load(fh)
    flag_map = {
        "m": args.m, "gamma_o": args.gamma, "epsilon": args.epsilon,
        "ci_alpha": args.alpha, "bins": args.bins,
        "laplace_alpha": args.laplace, "pool": args.pool, "seed": args.seed,
    }
    for k, v in flag_map.items():
        if v is not None:
            base[k] = v
    return GlideConfig(**base)


def _add_config_flags(p):
    p.add_argument("--config", help="JSON config file (flags take precedence)")
    p.add_argument("--m", type=int, help="number of environments")
    p.add_argument("--gamma", type=float, help="inverse downsampling rate floor")
    p.add_argument("--epsilon", type=float, help="invariance threshold")
    p.add_argument("--alpha", type=float, help="CI test significance level")
    p.add_argument("--bins", type=int, help="discretization bins")
    p.add_argument("--laplace", type=float, help="additive smoothing")
    p.add_argument("--pool", type=int, help="prior pool size")
    p.add_argument("--seed", type=int, help="master seed")


def cmd_gen_graph(args):
    dag = gen_random_dag(args.kind, args.d, args.e, args.seed)
    dag.save(args.out)
    _write_manifest(args.out, "gen-graph",
                    {"kind": args.kind, "d": args.d, "e": args.e},
                    [], args.seed)
    return 0


def cmd_gen_data(args):
    dag = Dag.load(args.graph)
    if args.model == "cat":
        ds, _ = simulate_categorical(dag, args.n, seed=args.seed)
        save_csv(args.out, ds)
    elif args.model == "lg":
        save_csv(args.out, simulate_linear_gaussian(dag, args.n, seed=args.seed),
                 names=dag.names)
    elif args.model == "nlng":
        save_csv(args.out, simulate_nonlinear(dag, args.n, seed=args.seed),
                 names=dag.names)
    else:
        raise ValueError(f"unknown model {args.model!r}")
    _write_manifest(args.out, "gen-data",
                    {"model": args.model, "n": args.n},
                    [args.graph], args.seed)
    return 0


def cmd_discover(args):
    cfg = _config_from_args(args)
    if args.mode == "cat":
        ds = load_csv(args.data, "cat")
    elif args.mode == "cont":
        table, names = load_csv(args.data, "cont")
        ds = discretize(table, bins=cfg.bins, names=names)
    else:
        raise ValueError(f"unknown mode {args.mode!r}")
    pred, report = glide(ds, cfg)
    pred.save(args.out)
    report_path = args.report or f"{args.out}.report.json"
    with open(report_path, "w") as fh:
        json.dump(report, fh, indent=2, default=str)
        fh.write("\n")
    _write_manifest(args.out, "discover", asdict(cfg), [args.data], cfg.seed)
    return 0


def cmd_eval(args):
    rep = metric_report(Dag.load(args.pred), Dag.load(args.truth))
    payload = asdict(rep)
    text = json.dumps(payload, indent=2)
    if args.json:
        with open(args.json, "w") as fh:
            fh.write(text + "\n")
    print(text)
    return 0


def _ci95(values):
    values = np.asarray(values, dtype=float)
    mean = float(values.mean())
    if len(values) < 2:
        return mean, 0.0
    half = float(stats.t.ppf(0.975, len(values) - 1)
                 * values.std(ddof=1) / np.sqrt(len(values)))
    return mean, half


def run_bench_cell(cell, base_seed=0):
    """One suite cell: generate, discover, evaluate over the listed seeds."""
    cfg_fields = {k: cell[k] for k in
                  ("m", "gamma_o", "epsilon", "ci_alpha", "bins",
                   "laplace_alpha", "pool", "min_rows") if k in cell}
    rows = []
    for seed in cell.get("seeds", [0]):
        truth = gen_random_dag(cell.get("kind", "erdos_renyi"),
                               cell["d"], cell["e"], seed=[base_seed, seed, 0])
        model = cell.get("model", "cat")
        if model == "cat":
            ds, _ = simulate_categorical(truth, cell["n"],
                                         seed=[base_seed, seed, 1])
        elif model == "lg":
            ds = discretize(simulate_linear_gaussian(
                truth, cell["n"], seed=[base_seed, seed, 1]),
                bins=cfg_fields.get("bins", 4), names=truth.names)
        elif model == "nlng":
            ds = discretize(simulate_nonlinear(
                truth, cell["n"], seed=[base_seed, seed, 1]),
                bins=cfg_fields.get("bins", 4), names=truth.names)
        else:
            raise ValueError(f"unknown model {model!r}")
        cfg = GlideConfig(seed=seed, **cfg_fields)
        t0 = time.time()
        pred, _ = glide(ds, cfg)
        runtime = time.time() - t0
        rep = metric_report(pred, truth)
        rows.append({"seed": seed, "shd": rep.shd,
                     "spurious": rep.spurious_rate, "tpr": rep.tpr,
                     "runtime": runtime})
    return rows


def cmd_bench(args):
    with open(args.suite) as fh:
        suite = json.load(fh)
    cells = suite["cells"] if isinstance(suite, dict) else suite
    results = []
    for idx, cell in enumerate(cells):
        entry = {"cell": idx, "spec": cell}
        try:
            rows = run_bench_cell(cell, base_seed=args.seed or 0)
            entry["runs"] = rows
            for metric in ("shd", "spurious", "tpr", "runtime"):
                mean, half = _ci95([r[metric] for r in rows])
                entry[f"{metric}_mean"] = mean
                entry[f"{metric}_ci95"] = half
        except Exception as exc:  # record partial failure, keep going
            entry["error"] = f"{type(exc).__name__}: {exc}"
        results.append(entry)
    with open(f"{args.out}.json", "w") as fh:
        json.dump(results, fh, indent=2, default=str)
        fh.write("\n")
    cols = ["cell", "shd_mean", "shd_ci95", "spurious_mean", "spurious_ci95",
            "tpr_mean", "tpr_ci95", "runtime_mean", "runtime_ci95", "error"]
    with open(f"{args.out}.csv", "w") as fh:
        fh.write(",".join(cols) + "\n")
        for entry in results:
            fh.write(",".join(str(entry.get(c, "")) for c in cols) + "\n")
    _write_manifest(args.out, "bench", {"suite": args.suite}, [args.suite],
                    args.seed or 0)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="glide",
        description="Causal graph discovery via effect-cause invariance")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-graph", help="generate a random DAG")
    p.add_argument("--kind", default="erdos_renyi",
                   choices=["erdos_renyi", "scale_free", "bipartite"])
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--e", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_graph)

    p = sub.add_parser("gen-data", help="simulate data from a graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--model", default="cat", choices=["cat", "lg", "nlng"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_data)

    p = sub.add_parser("discover", help="run the discovery pipeline")
    p.add_argument("--data", required=True)
    p.add_argument("--mode", default="cat", choices=["cat", "cont"])
    p.add_argument("--out", required=True)
    p.add_argument("--report", help="report JSON path (default <out>.report.json)")
    _add_config_flags(p)
    p.set_defaults(func=cmd_discover)

    p = sub.add_parser("eval", help="compare predicted and true graphs")
    p.add_argument("--pred", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--json", help="write the metric report to this path")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bench", help="run a benchmark suite")
    p.add_argument("--suite", required=True, help="suite config JSON")
    p.add_argument("--out", required=True, help="output path prefix")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except GlideError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
