"""Simulate the blinded judgment study against the service state machine.

Builds a balanced trial pool from synthetic demonstrations, then lets
simulated judges (who notice ascending-volume order and call it
human-like) work through sessions. Prints the per-source results table
and the pairwise statistics block for beam_3 vs beam_n.

Usage: python scripts/simulate_judgment_study.py [--judges 24] [--seed 0]
"""
import argparse
import random
import tempfile
from pathlib import Path

from packseq.catalog import default_catalog, default_container
from packseq.evalservice import EvaluationState, build_pool
from packseq.levels import build_level_table
from packseq.markov import MiningConfig, build_chain, extract_pairs, mine
from packseq.synthetic import synth_demos
from run_pipeline import ground_truth_chain


def judge_verdict(rng, catalog, sequence) -> str:
    """A crude simulated human: orders that pack big things first look human."""
    volumes = [catalog.get(o).volume for o in sequence]
    inversions = sum(
        1 for a, b in zip(volumes, volumes[1:]) if b > a * 1.15
    )
    p_human = max(0.05, 0.9 - 0.35 * inversions)
    return "human_generated" if rng.random() < p_human else "computer_generated"


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--judges", type=int, default=24)
    ap.add_argument("--per-type", type=int, default=6)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    catalog, container = default_catalog(), default_container()
    truth = ground_truth_chain(catalog)
    demos = synth_demos(truth, catalog, container, n=200, seed=args.seed)
    table = build_level_table(
        build_chain(mine(extract_pairs(demos), MiningConfig(0.032)))
    )
    trials = build_pool(
        demos, catalog, table, per_type=args.per_type, seed=args.seed,
    )

    log_path = Path(tempfile.mkdtemp()) / "judgments.jsonl"
    state = EvaluationState(trials, log_path, seed=args.seed)
    rng = random.Random(args.seed)
    for _ in range(args.judges):
        sid = state.create_session()
        for _ in range(4):  # each judge rates one pass over the source types
            trial = state.next_trial(sid)
            if trial is None:
                break
            state.submit_judgment(sid, trial.trial_id, judge_verdict(rng, catalog, trial.sequence))

    res = state.results(pair=("beam_3", "beam_n"))
    print(f"{'source':8s} {'n':>4s} {'human%':>7s} {'computer%':>10s}")
    for source in ("random", "real", "beam_n", "beam_3"):
        row = res["rows"][source]
        print(f"{source:8s} {row['n']:>4d} {str(row['judged_human_pct']):>7s} "
              f"{str(row['judged_computer_pct']):>10s}")
    pair = res["pair"]
    if pair["available"]:
        print(f"\nbeam_3 vs beam_n: boschloo p = {pair['boschloo_p']:.4f}, "
              f"h = {pair['cohens_h']:.3f}, power = {pair['power']:.3f}")
    print(f"judgment log: {log_path}")


if __name__ == "__main__":
    main()
