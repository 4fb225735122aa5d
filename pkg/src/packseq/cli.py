"""Command-line entry point for the packing-sequence pipeline.

Subcommands:
    train               dataset -> mined chain file
    plan                chain + object list -> packing plan
    analyze             dataset -> descriptive statistics report
    stats               2x2 table -> exact-test / effect-size / power report
    synth               ground-truth chain -> synthetic dataset
    evaluate build-pool dataset + chain -> balanced trial pool
    serve               run the judgment service

Defaults follow the pipeline constants: support threshold 0.032 and beam
width 5. Every subcommand is deterministic under fixed seeds.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from . import catalog as cat
from . import markov
from .evalservice import build_pool, write_pool
from .levels import build_level_table, table_for_chain
from .planner import PackingPlan, SearchConfig, predict, predict_full, random_sequence
from .stats import (
    Contingency2x2,
    boschloo_one_sided,
    cohens_h,
    effect_band,
    fisher_one_sided,
    linreg,
    power_two_prop,
)
from .synthetic import synth_demos

DEFAULT_THRESHOLD = 0.032
DEFAULT_BEAM_WIDTH = 5


def _emit(payload: dict, fmt: str, text_lines) -> None:
    if fmt == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for line in text_lines:
            print(line)


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return 1


# ---------------------------------------------------------------------------
# Subcommand handlers
# ---------------------------------------------------------------------------

def cmd_train(args) -> int:
    catalog = cat.load_catalog(args.catalog) if args.catalog else None
    demos = cat.load_dataset(args.dataset, catalog)
    if not demos:
        return _fail("dataset is empty")
    pairs = markov.extract_pairs(demos)
    if args.threshold > 1.0:
        kept = []  # support never exceeds 1, so nothing can survive
    else:
        config = markov.MiningConfig(
            support_threshold=args.threshold, weight_mode=args.weight_mode
        )
        kept = markov.mine(pairs, config)
    if not kept:
        print(
            f"warning: degenerate model: no pairs reach support {args.threshold}",
            file=sys.stderr,
        )
        return 1
    chain = markov.build_chain(kept, weight_mode=args.weight_mode)
    markov.save_chain(chain, args.out)
    report = None
    if catalog is not None:
        report = markov.validate_chain(chain, catalog)
    payload = {
        "demonstrations": len(demos),
        "pairs_extracted": len(pairs),
        "pairs_kept": len(kept),
        "states": len(chain.states),
        "out": str(args.out),
    }
    lines = [
        f"trained chain on {len(demos)} demonstrations",
        f"pairs: {len(pairs)} extracted, {len(kept)} kept at threshold {args.threshold}",
        f"chain: {len(chain.states)} states -> {args.out}",
    ]
    if report is not None:
        payload["leaf_states"] = report.leaf_states
        payload["absent_objects"] = report.absent_objects
        if report.leaf_states:
            lines.append(f"leaf states: {', '.join(report.leaf_states)}")
        if report.absent_objects:
            lines.append(f"objects absent from chain: {', '.join(report.absent_objects)}")
    _emit(payload, args.format, lines)
    return 0


def cmd_plan(args) -> int:
    objects = [o.strip() for o in args.objects.split(",") if o.strip()]
    if not objects:
        return _fail("no objects given")
    if len(set(objects)) != len(objects):
        return _fail("duplicate object ids in --objects")
    if args.catalog:
        catalog = cat.load_catalog(args.catalog)
        unknown = sorted(o for o in objects if o not in catalog)
        if unknown:
            return _fail(f"objects not in catalog: {', '.join(unknown)}")
    if args.mode == "random":
        plan = random_sequence(objects, seed=args.seed)
    else:
        chain = markov.load_chain(args.chain)
        table = table_for_chain(chain, cache_path=args.table_cache)
        if args.mode == "beam-3":
            config = SearchConfig(beam_width=args.beam_width, max_len=args.max_len)
            plan = predict_full(table, objects, config)
        else:
            config = SearchConfig(beam_width=args.beam_width)
            plan = predict(table, objects, config)
    payload = plan.to_record()
    payload["mode"] = args.mode
    lines = [f"plan ({args.mode}): {' -> '.join(plan.sequence) or '(empty)'}"]
    if plan.log_prob is not None:
        lines.append(f"log-probability: {plan.log_prob:.6f}")
    if plan.leftovers:
        lines.append(f"leftovers (appended, unreachable): {', '.join(plan.leftovers)}")
    _emit(payload, args.format, lines)
    return 0


def cmd_analyze(args) -> int:
    catalog = cat.load_catalog(args.catalog) if args.catalog else None
    demos = cat.load_dataset(args.dataset, catalog)
    if not demos:
        return _fail("dataset is empty")
    stats = cat.dataset_stats(demos, bin_width=args.bin_width)
    xs, ys = cat.duration_by_object_count(demos)
    payload = {
        "scenes": stats.count,
        "manipulations": sum(len(d.sequence) for d in demos),
        "duration_mean_s": stats.duration_mean,
        "duration_std_s": stats.duration_std,
        "histogram_bin_width_s": stats.bin_width,
        "histogram": stats.histogram,
        "std_convention": "population",
    }
    lines = [
        f"scenes: {stats.count}",
        f"object manipulations: {payload['manipulations']}",
        f"duration: mean {stats.duration_mean:.1f} s, std {stats.duration_std:.1f} s (population)",
    ]
    if len(set(xs)) > 1:
        fit = linreg(xs, ys)
        payload["seconds_per_object"] = fit.slope
        payload["regression_intercept_s"] = fit.intercept
        payload["regression_r"] = fit.r
        lines.append(
            f"duration vs object count: {fit.slope:.2f} s/object (r={fit.r:.3f})"
        )
    hist_line = " ".join(str(c) for c in stats.histogram)
    lines.append(f"duration histogram ({stats.bin_width:g} s bins): {hist_line}")
    if args.placement_object:
        try:
            ps = cat.placement_stats(demos, args.placement_object)
        except cat.DatasetError as exc:
            return _fail(str(exc))
        payload["placement"] = {
            "object_id": ps.object_id,
            "mean": [ps.mean_x, ps.mean_y],
            "std": [ps.std_x, ps.std_y],
            "count": ps.count,
        }
        lines.append(
            f"{ps.object_id}: mean ({ps.mean_x:.3f}, {ps.mean_y:.3f}), "
            f"std ({ps.std_x:.3f}, {ps.std_y:.3f}), n={ps.count}"
        )
    _emit(payload, args.format, lines)
    return 0


def cmd_stats(args) -> int:
    try:
        s1, f1, s2, f2 = (int(v) for v in args.table.split(","))
        table = Contingency2x2(s1, f1, s2, f2)
    except ValueError as exc:
        return _fail(f"bad --table: {exc}")
    fisher = fisher_one_sided(table)
    boschloo = boschloo_one_sided(table, grid_size=args.grid)
    h = cohens_h(table.p1, table.p2)
    power = power_two_prop(h, table.n1, table.n2, alpha=args.alpha, one_tailed=True)
    payload = {
        "table": {"s1": s1, "f1": f1, "s2": s2, "f2": f2},
        "proportions": {"p1": table.p1, "p2": table.p2},
        "fisher_one_sided_p": fisher.p_value,
        "boschloo_p": boschloo.p_value,
        "cohens_h": h,
        "effect_band": effect_band(h),
        "power_one_tailed": power,
        "alpha": args.alpha,
        "grid_size": args.grid,
    }
    lines = [
        f"table: s1={s1} f1={f1} | s2={s2} f2={f2}  (p1={table.p1:.4f}, p2={table.p2:.4f})",
        f"fisher one-sided p:  {fisher.p_value:.6f}",
        f"boschloo p:          {boschloo.p_value:.6f}  (grid {args.grid})",
        f"cohen's h:           {h:.4f}  ({effect_band(h)})",
        f"power (one-tailed):  {power:.4f}  at alpha={args.alpha}",
    ]
    _emit(payload, args.format, lines)
    return 0


def cmd_synth(args) -> int:
    chain = markov.load_chain(args.chain)
    catalog = cat.load_catalog(args.catalog)
    try:
        w, d, h = (float(v) for v in args.container.split("x"))
        container = cat.ContainerSpec(w, d, h)
    except ValueError as exc:
        return _fail(f"bad --container: {exc}")
    demos = synth_demos(chain, catalog, container, n=args.n, seed=args.seed)
    cat.write_dataset(demos, args.out)
    _emit(
        {"demonstrations": len(demos), "out": str(args.out)},
        args.format,
        [f"wrote {len(demos)} synthetic demonstrations -> {args.out}"],
    )
    return 0


def cmd_build_pool(args) -> int:
    catalog = cat.load_catalog(args.catalog)
    demos = cat.load_dataset(args.dataset, catalog)
    chain = markov.load_chain(args.chain)
    table = build_level_table(chain)
    trials = build_pool(
        demos,
        catalog,
        table,
        per_type=args.per_type,
        seed=args.seed,
        beam_width=args.beam_width,
        created_at=args.timestamp,
    )
    write_pool(trials, args.out)
    _emit(
        {"trials": len(trials), "per_type": args.per_type, "out": str(args.out)},
        args.format,
        [f"wrote {len(trials)} trials ({args.per_type} per source type) -> {args.out}"],
    )
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .evalservice import create_app

    app = create_app(args.pool, args.log, seed=args.seed, ui_dir=args.ui)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _add_format(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("text", "json"), default="text")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="packseq", description="packing-sequence prediction pipeline"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="mine a chain from a demonstration dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--catalog", default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    p.add_argument("--weight-mode", choices=("support", "count"), default="support")
    _add_format(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("plan", help="predict a packing order for an object set")
    p.add_argument("--chain", default=None)
    p.add_argument("--catalog", default=None)
    p.add_argument("--objects", required=True, help="comma-separated object ids")
    p.add_argument("--mode", choices=("beam-n", "beam-3", "random"), default="beam-n")
    p.add_argument("--beam-width", type=int, default=DEFAULT_BEAM_WIDTH)
    p.add_argument("--max-len", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--table-cache", default=None,
                   help="level-table cache file, rebuilt when the chain changes")
    _add_format(p)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("analyze", help="descriptive statistics for a dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--catalog", default=None)
    p.add_argument("--bin-width", type=float, default=10.0)
    p.add_argument("--placement-object", default=None)
    _add_format(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("stats", help="exact tests and power for a 2x2 table")
    p.add_argument("--table", required=True, help="s1,f1,s2,f2")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--grid", type=int, default=2000)
    p.add_argument(
        "--pair-test",
        choices=("boschloo",),
        default="boschloo",
        help="pairwise exact test to run (boschloo)",
    )
    _add_format(p)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("synth", help="generate synthetic demonstrations")
    p.add_argument("--chain", required=True, help="ground-truth chain file")
    p.add_argument("--catalog", required=True)
    p.add_argument("--container", required=True, help="WxDxH in meters, e.g. 0.36x0.28x0.125")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    _add_format(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("evaluate", help="judgment-study utilities")
    esub = p.add_subparsers(dest="evaluate_command", required=True)
    bp = esub.add_parser("build-pool", help="build a balanced trial pool")
    bp.add_argument("--dataset", required=True)
    bp.add_argument("--catalog", required=True)
    bp.add_argument("--chain", required=True)
    bp.add_argument("--per-type", type=int, default=4)
    bp.add_argument("--seed", type=int, default=0)
    bp.add_argument("--beam-width", type=int, default=DEFAULT_BEAM_WIDTH)
    bp.add_argument("--timestamp", default=None, help="fixed created_at for reproducible pools")
    bp.add_argument("--out", required=True)
    _add_format(bp)
    bp.set_defaults(func=cmd_build_pool)

    # serve flags fall back to PACKSEQ_* environment variables
    env = os.environ
    p = sub.add_parser("serve", help="run the judgment service")
    p.add_argument("--pool", default=env.get("PACKSEQ_POOL"),
                   required="PACKSEQ_POOL" not in env)
    p.add_argument("--log", default=env.get("PACKSEQ_LOG"),
                   required="PACKSEQ_LOG" not in env)
    p.add_argument("--host", default=env.get("PACKSEQ_HOST", "127.0.0.1"))
    p.add_argument("--port", type=int, default=int(env.get("PACKSEQ_PORT", "8000")))
    p.add_argument("--seed", type=int, default=int(env.get("PACKSEQ_SEED", "0")))
    p.add_argument("--ui", default=env.get("PACKSEQ_UI"),
                   help="directory of built UI assets to serve at /")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (cat.DatasetError, cat.SceneSamplingError, markov.DegenerateChainError) as exc:
        return _fail(str(exc))
    except FileNotFoundError as exc:
        return _fail(f"{exc.filename}: file not found")
    except ValueError as exc:
        return _fail(str(exc))


if __name__ == "__main__":
    sys.exit(main())
