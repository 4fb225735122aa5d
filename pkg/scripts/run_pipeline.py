"""End-to-end demo on synthetic data: generate -> train -> validate -> plan.

Draws demonstrations from a hand-built ground-truth chain over the
built-in 24-object catalog, mines a chain back out of them, checks the
recovery, and prints plans from all three sequence generators for one
sampled scene.

Usage: python scripts/run_pipeline.py [--n 2000] [--seed 0] [--workdir out]
"""
import argparse
import math
import random
from pathlib import Path

from packseq.catalog import default_catalog, default_container, sample_scene, write_dataset
from packseq.levels import build_level_table
from packseq.markov import (
    START,
    MarkovChain,
    MiningConfig,
    build_chain,
    extract_pairs,
    mine,
    save_chain,
    validate_chain,
)
from packseq.planner import SearchConfig, predict, predict_full, random_sequence
from packseq.synthetic import synth_demos


def ground_truth_chain(catalog) -> MarkovChain:
    """A plausible hand-built packing chain: big sturdy items first, small
    fragile ones last, with light random branching."""
    ids = sorted(catalog.ids, key=lambda i: -catalog.get(i).volume)
    rng = random.Random(7)
    edges = {START: [(ids[0], 0.6), (ids[1], 0.4)]}
    for k, obj in enumerate(ids):
        nxt = [o for o in ids[k + 1 : k + 4] if o != obj]
        if not nxt:
            continue
        weights = [rng.uniform(0.5, 1.0) for _ in nxt]
        total = sum(weights)
        edges[obj] = [(o, w / total) for o, w in zip(nxt, weights)]
    return MarkovChain(edges)


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workdir", default="pipeline-out")
    args = ap.parse_args()

    workdir = Path(args.workdir)
    workdir.mkdir(parents=True, exist_ok=True)
    catalog, container = default_catalog(), default_container()

    truth = ground_truth_chain(catalog)
    save_chain(truth, workdir / "truth.json")
    demos = synth_demos(truth, catalog, container, n=args.n, seed=args.seed)
    write_dataset(demos, workdir / "demos.jsonl")
    print(f"generated {len(demos)} demonstrations "
          f"(mean length {sum(len(d.sequence) for d in demos) / len(demos):.1f})")

    pairs = extract_pairs(demos)
    kept = mine(pairs, MiningConfig(support_threshold=0.032))
    learned = build_chain(kept)
    save_chain(learned, workdir / "learned.json")
    report = validate_chain(learned, catalog)
    print(f"mined {len(kept)}/{len(pairs)} pairs at threshold 0.032; "
          f"{len(learned.states)} states")
    if report.leaf_states:
        print(f"  leaf states: {', '.join(report.leaf_states)}")
    if report.absent_objects:
        print(f"  absent objects: {', '.join(report.absent_objects)}")

    table = build_level_table(learned)
    scene = sorted(sample_scene(catalog, container, seed=args.seed + 1))
    print(f"\nscene ({len(scene)} objects): {', '.join(scene)}")
    for label, plan in [
        ("random ", random_sequence(scene, seed=args.seed)),
        ("beam-N ", predict(table, scene, SearchConfig(beam_width=5))),
        ("beam-3 ", predict_full(table, scene, SearchConfig(beam_width=5, max_len=3))),
    ]:
        lp = "" if plan.log_prob is None else f"  (log-prob {plan.log_prob:.3f})"
        print(f"  {label}: {' -> '.join(plan.sequence)}{lp}")
        if plan.leftovers:
            print(f"           leftovers: {', '.join(plan.leftovers)}")
    print(f"\nartifacts in {workdir}/")


if __name__ == "__main__":
    main()
