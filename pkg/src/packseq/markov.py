"""Ordered-pair mining and the first-order packing chain.

Adjacent ordered pairs (including a virtual start state before the first
object) are extracted from demonstration sequences, filtered by a support
threshold, and normalized into a transition model: for every source state
the retained pair weights are rescaled to sum to one.
"""
from __future__ import annotations

import hashlib
import json
from collections import Counter
from dataclasses import dataclass

from .catalog import ObjectCatalog

START = "<start>"

PROB_SUM_TOL = 1e-9


class DegenerateChainError(ValueError):
    """All pairs were filtered out; there is no chain to build."""


@dataclass(frozen=True)
class PairSupport:
    source: str  # START or an object id
    target: str  # always an object id
    support: float  # fraction of demonstrations containing the pair
    count: int  # number of demonstrations containing the pair


@dataclass
class MiningConfig:
    support_threshold: float = 0.032
    weight_mode: str = "support"  # pre-normalization edge weight: "support" or "count"

    def __post_init__(self):
        if not (0.0 <= self.support_threshold <= 1.0):
            raise ValueError("support_threshold must be within [0, 1]")
        if self.weight_mode not in ("support", "count"):
            raise ValueError("weight_mode must be 'support' or 'count'")


class MarkovChain:
    """Normalized transition model over {START} and object ids.

    edges maps each non-leaf state to its outgoing (target, prob) list,
    sorted by target. States without an entry are leaves.
    """

    def __init__(self, edges: dict[str, list[tuple[str, float]]], states=None):
        clean: dict[str, tuple[tuple[str, float], ...]] = {}
        all_states: set[str] = set() if states is None else set(states)
        all_states.add(START)
        for source, out in edges.items():
            if not out:
                continue
            out = sorted(out)
            total = 0.0
            for target, prob in out:
                if target == START:
                    raise ValueError(f"edge into {START} from {source!r}")
                if target == source:
                    raise ValueError(f"self-loop on {source!r}")
                if not (prob > 0.0):
                    raise ValueError(f"non-positive prob on {source!r}->{target!r}")
                total += prob
                all_states.add(target)
            if abs(total - 1.0) > PROB_SUM_TOL:
                raise ValueError(f"probs from {source!r} sum to {total!r}, not 1")
            all_states.add(source)
            clean[source] = tuple(out)
        self.edges = clean
        self.states = frozenset(all_states)

    @property
    def objects(self) -> set[str]:
        return set(self.states) - {START}

    def targets(self, state: str) -> tuple[tuple[str, float], ...]:
        return self.edges.get(state, ())

    def leaf_states(self) -> list[str]:
        return sorted(s for s in self.states if s not in self.edges)

    # -- serialization ------------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "states": sorted(self.states),
            "edges": {s: [[t, p] for t, p in out] for s, out in sorted(self.edges.items())},
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "MarkovChain":
        edges = {s: [(t, p) for t, p in out] for s, out in data["edges"].items()}
        return cls(edges, states=data.get("states"))

    def content_hash(self) -> str:
        blob = json.dumps(self.to_json_dict(), sort_keys=True).encode("utf-8")
        return hashlib.sha256(blob).hexdigest()


def save_chain(chain: MarkovChain, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(chain.to_json_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_chain(path) -> MarkovChain:
    with open(path, encoding="utf-8") as fh:
        return MarkovChain.from_json_dict(json.load(fh))


# ---------------------------------------------------------------------------
# Mining
# ---------------------------------------------------------------------------

def extract_pairs(demos) -> list[PairSupport]:
    """Adjacent ordered pairs per demonstration, plus (START -> first object).

    Support is the fraction of demonstrations containing the pair; since a
    sequence never repeats an object, a pair occurs at most once per
    demonstration and count equals the number of containing demonstrations.
    """
    demos = list(demos)
    if not demos:
        raise ValueError("extract_pairs requires at least one demonstration")
    counts: Counter[tuple[str, str]] = Counter()
    for demo in demos:
        seq = demo.sequence
        counts[(START, seq[0])] += 1
        for a, b in zip(seq, seq[1:]):
            counts[(a, b)] += 1
    total = len(demos)
    return [
        PairSupport(source, target, count / total, count)
        for (source, target), count in sorted(counts.items())
    ]


def mine(pairs, config: MiningConfig) -> list[PairSupport]:
    """Keep exactly the pairs whose support reaches the threshold."""
    return [p for p in pairs if p.support >= config.support_threshold]


def build_chain(pairs, weight_mode: str = "support") -> MarkovChain:
    """Normalize retained pair weights per source state into a chain."""
    pairs = list(pairs)
    if not pairs:
        raise DegenerateChainError("no pairs survived mining; chain would be empty")
    by_source: dict[str, list[PairSupport]] = {}
    for p in pairs:
        by_source.setdefault(p.source, []).append(p)
    edges: dict[str, list[tuple[str, float]]] = {}
    states: set[str] = {START}
    for source, group in by_source.items():
        weights = [p.support if weight_mode == "support" else float(p.count) for p in group]
        total = sum(weights)
        edges[source] = [(p.target, w / total) for p, w in zip(group, weights)]
        states.add(source)
        states.update(p.target for p in group)
    return MarkovChain(edges, states=states)


@dataclass(frozen=True)
class ChainValidationReport:
    """Informational coverage report; never fatal."""

    leaf_states: list[str]  # chain states with zero outgoing edges
    absent_objects: list[str]  # catalog objects that never entered the chain

    @property
    def clean(self) -> bool:
        return not self.leaf_states and not self.absent_objects


def validate_chain(chain: MarkovChain, catalog: ObjectCatalog) -> ChainValidationReport:
    absent = sorted(i for i in catalog.ids if i not in chain.states)
    return ChainValidationReport(leaf_states=chain.leaf_states(), absent_objects=absent)
