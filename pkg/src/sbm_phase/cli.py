"""sbm-phase: sweeps, detection, estimation and concentration checks.

Exit codes: 0 success, 1 usage, 2 data/parse error, 3 solver did not
converge.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .detect import detectability, partition
from .eigen import SolverConfig, leading_eigenpair, leading_singular_value
from .estimator import estimate
from .graph import EmptyGraphError
from .ingest import EdgeListFile, LabeledGraph, ParseError, preprocess, read_edge_list, read_labels
from .modularity import ModularityOperator
from .sbm import SbmParams, generate_cross_block
from .transition import crossing_bracket, p_grid, run_sweep, theoretical_threshold, trial_seed

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NOT_CONVERGED = 0, 1, 2, 3

PRESETS = {
    "fig1-desk": dict(n1=500, n2=500, p1=0.25, p2=0.25, p_min=0.05, p_max=0.45, p_step=0.05, trials=20),
    "fig2-desk": dict(n1=500, n2=1000, p1=0.5, p2=0.25, p_min=0.05, p_max=0.6, p_step=0.05, trials=20),
    "fig1-full": dict(n1=2000, n2=2000, p1=0.25, p2=0.25, p_min=0.05, p_max=0.45, p_step=0.025, trials=100),
    "fig2-full": dict(n1=1000, n2=2000, p1=0.5, p2=0.25, p_min=0.05, p_max=0.6, p_step=0.025, trials=100),
}
SWEEP_DEFAULTS = PRESETS["fig1-desk"]

CSV_COLUMNS = [
    "p",
    "trials_ok",
    "mean_lambda_over_n",
    "std_lambda_over_n",
    "pred_lambda_over_n",
    "mean_detectability",
    "std_detectability",
    "mean_y1_sum",
    "mean_y2_sum",
    "mean_y1_entry_scaled",
    "mean_y2_entry_scaled",
]


class UsageError(Exception):
    pass


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".10g")


def _json_safe(obj):
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, np.generic):
        return _json_safe(obj.item())
    return obj


def _dump_json(obj) -> str:
    return json.dumps(_json_safe(obj), indent=2, sort_keys=True) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def _threads(value: int | None) -> int:
    if value is not None:
        return max(1, value)
    env = os.environ.get("SBM_PHASE_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise UsageError(f"SBM_PHASE_THREADS={env!r} is not an integer") from None
    return os.cpu_count() or 1


def _solver(args) -> SolverConfig:
    try:
        return SolverConfig(tol=args.tol, max_iter=args.max_iter, seed=args.solver_seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


# ---------------------------------------------------------------- sweep


def sweep_csv(records) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in records:
        writer.writerow([_fmt(getattr(r, col)) for col in CSV_COLUMNS])
    return buf.getvalue()


def cmd_sweep(args) -> int:
    settings = dict(SWEEP_DEFAULTS)
    if args.preset:
        settings.update(PRESETS[args.preset])
    for key in settings:
        value = getattr(args, key)
        if value is not None:
            settings[key] = value
    try:
        grid = p_grid(settings["p_min"], settings["p_max"], settings["p_step"])
        base = SbmParams(settings["n1"], settings["n2"], settings["p1"], settings["p2"], 0.0)
        if not all(0.0 <= p <= 1.0 for p in grid):
            raise ValueError("grid leaves [0, 1]")
    except ValueError as exc:
        raise UsageError(f"invalid sweep parameters: {exc}") from None
    if settings["trials"] < 1:
        raise UsageError("--trials must be >= 1")
    cfg = _solver(args)
    method = "kmeans2" if args.method == "kmeans" else "sign"

    records = run_sweep(base, grid, settings["trials"], args.seed, cfg, method, workers=_threads(args.threads))
    text = sweep_csv(records)
    _emit(text, args.out)

    manifest = {
        "tool": "sbm-phase",
        "version": __version__,
        "command": "sweep",
        "preset": args.preset,
        "parameters": {**settings, "method": method, "tol": cfg.tol, "max_iter": cfg.max_iter,
                       "solver": cfg.method, "krylov_dim": cfg.krylov_dim, "solver_seed": cfg.seed},
        "master_seed": args.seed,
        "seed_rule": "blake2b-64 of repr('trial', master_seed, p_index, trial)",
        "p_grid": grid,
        "p_star": theoretical_threshold(settings["p1"], settings["p2"]),
        "crossing_bracket_0.75": crossing_bracket(records),
        "records": [
            {
                **{k: v for k, v in vars(r).items() if k != "results"},
                "trial_results": [vars(t) for t in r.results],
            }
            for r in records
        ],
    }
    manifest_path = args.manifest or (str(Path(args.out).with_suffix(".json")) if args.out else None)
    if manifest_path:
        Path(manifest_path).write_text(_dump_json(manifest), encoding="utf-8", newline="\n")
    if any(not r.valid for r in records):
        return EXIT_NOT_CONVERGED
    return EXIT_OK


# ---------------------------------------------------------------- detect / estimate


def _load(args) -> LabeledGraph:
    lg = read_edge_list(EdgeListFile(Path(args.edges), dialect=args.dialect, num_nodes=args.num_nodes))
    labels = None
    if getattr(args, "labels", None):
        labels = read_labels(args.labels, lg.id_map, dialect=args.dialect)
    lg = LabeledGraph(lg.graph, lg.id_map, labels)
    return preprocess(lg, drop_isolated=args.drop_isolated, largest_component=args.largest_component)


def _detect(lg: LabeledGraph, args):
    op = ModularityOperator(lg.graph)
    res = leading_eigenpair(op, _solver(args))
    method = "kmeans2" if args.method == "kmeans" else "sign"
    return res, partition(res.y, method)


def cmd_detect(args) -> int:
    lg = _load(args)
    res, part = _detect(lg, args)
    report = {
        "n": lg.graph.n,
        "edges": lg.graph.num_edges,
        "lambda_max": res.lambda_max,
        "lambda_over_n": res.lambda_max / lg.graph.n,
        "iterations": res.iterations,
        "residual": res.residual,
        "converged": res.converged,
        "method": part.method,
        "sizes": list(part.sizes),
    }
    if lg.labels is not None:
        report["detectability"] = detectability(part, lg.labels)
    _emit(_dump_json(report), args.out)
    return EXIT_OK if res.converged else EXIT_NOT_CONVERGED


def cmd_estimate(args) -> int:
    lg = _load(args)
    status = EXIT_OK
    if args.from_detection:
        res, part = _detect(lg, args)
        labels = part.labels
        if not res.converged:
            status = EXIT_NOT_CONVERGED
    else:
        labels = lg.labels
    est = estimate(lg.graph, labels, convention=args.convention)
    out = est.to_dict()
    out["source"] = "detection" if args.from_detection else "labels"
    _emit(_dump_json(out), args.out)
    return status


# ---------------------------------------------------------------- concentration


def cmd_validate_concentration(args) -> int:
    if args.n1 < 1 or args.n2 < 1:
        raise UsageError("--n1 and --n2 must be >= 1")
    if not 0.0 <= args.p <= 1.0:
        raise UsageError("--p must lie in [0, 1]")
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    cfg = _solver(args)
    scale = math.sqrt(args.n1 * args.n2)
    values = []
    for t in range(args.trials):
        C = generate_cross_block(args.n1, args.n2, args.p, trial_seed(args.seed, 0, t))
        values.append(leading_singular_value(C, cfg) / scale)
    dev = [abs(v - args.p) for v in values]
    report = {
        "n1": args.n1,
        "n2": args.n2,
        "p": args.p,
        "trials": args.trials,
        "master_seed": args.seed,
        "sigma1_scaled": values,
        "mean": float(np.mean(values)),
        "max_abs_deviation": max(dev),
    }
    _emit(_dump_json(report), args.out)
    return EXIT_OK


# ---------------------------------------------------------------- parser


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tol", type=float, default=1e-8, help="eigen residual tolerance")
    p.add_argument("--max-iter", type=int, default=20000, help="operator applications per solve")
    p.add_argument("--solver-seed", type=int, default=0, help="start-vector seed")


def _add_graph_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--edges", required=True, help="whitespace edge list")
    p.add_argument("--dialect", choices=("str", "int"), default="str", help="node id dialect")
    p.add_argument("--num-nodes", type=int, default=None, help="node count for the int dialect")
    p.add_argument("--drop-isolated", action="store_true", help="remove degree-0 nodes")
    p.add_argument("--largest-component", action="store_true", help="keep the largest connected component")
    p.add_argument("--method", choices=("sign", "kmeans"), default="sign")
    p.add_argument("--out", default=None, help="output file (stdout if absent)")
    _add_solver_flags(p)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sbm-phase", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="Monte-Carlo sweep over the inter-community probability")
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--n1", type=int)
    p.add_argument("--n2", type=int)
    p.add_argument("--p1", type=float)
    p.add_argument("--p2", type=float)
    p.add_argument("--p-min", type=float)
    p.add_argument("--p-max", type=float)
    p.add_argument("--p-step", type=float)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument("--method", choices=("sign", "kmeans"), default="sign")
    p.add_argument("--threads", type=int, default=None, help="worker processes (env SBM_PHASE_THREADS)")
    p.add_argument("--out", default=None, help="CSV path (stdout if absent); manifest goes next to it")
    p.add_argument("--manifest", default=None, help="JSON manifest path")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("detect", help="spectral modularity detection on an edge list")
    _add_graph_flags(p)
    p.add_argument("--labels", default=None, help="ground-truth label file")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("estimate", help="empirical p, p1, p2 and threshold estimates")
    _add_graph_flags(p)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--labels", default=None, help="partition from a label file")
    src.add_argument("--from-detection", action="store_true", help="partition from spectral detection")
    p.add_argument("--convention", choices=("single", "double"), default="single",
                   help="count within-community edges once or twice")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("validate-concentration", help="sigma_1(C)/sqrt(n1 n2) versus p")
    p.add_argument("--n1", type=int, default=1000)
    p.add_argument("--n2", type=int, default=1000)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    _add_solver_flags(p)
    p.set_defaults(func=cmd_validate_concentration)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"sbm-phase: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, EmptyGraphError, ValueError, OSError) as exc:
        print(f"sbm-phase: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except RuntimeError as exc:
        print(f"sbm-phase: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED


if __name__ == "__main__":
    sys.exit(main())
