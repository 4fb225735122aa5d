"""Per-state transition table grouped by minimum hop count ("levels").

For every source state, every reachable target is filed under exactly one
level: the length of the shortest simple path from source to target.
Level 1 therefore reproduces the chain's direct edges; level k >= 2 holds
the targets that need k hops, scored with the maximum product of edge
probabilities over paths of that exact length, together with the
intermediate states of the best path. The start state can be a source but
never an intermediate or a target.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

from .markov import START, MarkovChain


@dataclass(frozen=True)
class LevelEntry:
    target: str
    prob: float  # max product of edge probs over shortest simple paths
    path: tuple[str, ...]  # intermediate states only; len(path) == level - 1


class LevelTable:
    def __init__(self, per_state: dict[str, dict[int, list[LevelEntry]]], chain_hash: str):
        self.per_state = per_state
        self.chain_hash = chain_hash
        self.max_level = max(
            (lvl for levels in per_state.values() for lvl in levels), default=0
        )

    def levels_from(self, state: str) -> dict[int, list[LevelEntry]]:
        return self.per_state.get(state, {})

    def at(self, state: str, level: int) -> list[LevelEntry]:
        return self.per_state.get(state, {}).get(level, [])

    def lookup(self, state: str, target: str) -> tuple[int, LevelEntry] | None:
        """The (level, entry) under which target is reachable from state."""
        for level, entries in self.per_state.get(state, {}).items():
            for entry in entries:
                if entry.target == target:
                    return level, entry
        return None


def build_level_table(chain: MarkovChain, max_level: int | None = None) -> LevelTable:
    """Layered dynamic program over the chain's shortest simple paths.

    Hop counts strictly increase along a shortest path, so the best
    probability for a target at distance d extends some best probability at
    distance d-1; ties between equally probable paths break on the
    lexicographically smallest node sequence.
    """
    if max_level is None:
        max_level = max(1, len(chain.states) - 1)
    if max_level < 1:
        raise ValueError("max_level must be >= 1")
    per_state: dict[str, dict[int, list[LevelEntry]]] = {}
    for source in sorted(chain.states):
        levels = _levels_from_source(chain, source, max_level)
        if levels:
            per_state[source] = levels
    return LevelTable(per_state, chain.content_hash())


def _levels_from_source(
    chain: MarkovChain, source: str, max_level: int
) -> dict[int, list[LevelEntry]]:
    # best[node] = (prob, intermediates) for the node's shortest-distance level
    best: dict[str, tuple[float, tuple[str, ...]]] = {}
    levels: dict[int, list[LevelEntry]] = {}
    frontier = [source]
    seen = {source}
    dist = 0
    while frontier and dist < max_level:
        dist += 1
        candidates: dict[str, tuple[float, tuple[str, ...]]] = {}
        for node in frontier:
            prob_so_far, inter = (1.0, ()) if node == source else best[node]
            hops = inter + (node,) if node != source else ()
            for target, p in chain.targets(node):
                if target in seen:
                    continue
                cand = (prob_so_far * p, hops)
                prev = candidates.get(target)
                if prev is None or _better(cand, prev):
                    candidates[target] = cand
        if not candidates:
            break
        entries = [
            LevelEntry(target, prob, path)
            for target, (prob, path) in sorted(candidates.items())
        ]
        levels[dist] = entries
        best.update(candidates)
        seen.update(candidates)
        frontier = sorted(candidates)
    return levels


def _better(cand: tuple[float, tuple[str, ...]], prev: tuple[float, tuple[str, ...]]) -> bool:
    if cand[0] != prev[0]:
        return cand[0] > prev[0]
    return cand[1] < prev[1]


def transitions_at(
    table: LevelTable, state: str, level: int, exclude: set[str] = frozenset()
) -> list[LevelEntry]:
    """Level slice from a state, dropping entries whose TARGET is excluded.

    Intermediates on a path may be excluded objects; a multi-hop transition
    is exactly the move that routes through currently unavailable states.
    """
    if level < 1:
        raise ValueError("level must be >= 1")
    return [e for e in table.at(state, level) if e.target not in exclude]


# ---------------------------------------------------------------------------
# Optional on-disk cache, keyed by the source chain's content hash
# ---------------------------------------------------------------------------

def save_level_table(table: LevelTable, path) -> None:
    data = {
        "chain_hash": table.chain_hash,
        "per_state": {
            state: {
                str(level): [[e.target, e.prob, list(e.path)] for e in entries]
                for level, entries in levels.items()
            }
            for state, levels in table.per_state.items()
        },
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, sort_keys=True)
        fh.write("\n")


def load_level_table(path, expected_chain_hash: str | None = None) -> LevelTable:
    """Load a cached table; raises if it was built from a different chain."""
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if expected_chain_hash is not None and data["chain_hash"] != expected_chain_hash:
        raise ValueError("level table cache is stale (chain hash mismatch)")
    per_state = {
        state: {
            int(level): [LevelEntry(t, p, tuple(path)) for t, p, path in entries]
            for level, entries in levels.items()
        }
        for state, levels in data["per_state"].items()
    }
    return LevelTable(per_state, data["chain_hash"])


def table_for_chain(chain: MarkovChain, cache_path=None) -> LevelTable:
    """Build the table, reusing a cache file when it matches the chain."""
    if cache_path is not None:
        try:
            return load_level_table(cache_path, expected_chain_hash=chain.content_hash())
        except (OSError, ValueError, KeyError):
            pass
    table = build_level_table(chain)
    if cache_path is not None:
        save_level_table(table, cache_path)
    return table
