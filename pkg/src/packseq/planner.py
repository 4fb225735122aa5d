"""Packing-sequence prediction by level-wise beam search.

Beams start at the virtual start state. Each round tries transition level
1 first and climbs only while no beam can extend; as soon as one round
extends at least one beam, the surviving list is ranked and pruned to the
beam width and the next round resets to level 1. A beam therefore always
extends at its own minimum feasible level. The final pick prefers beams
that can still grow, then longer sequences, then higher probability, and
breaks remaining ties lexicographically. Objects the chain cannot reach
are appended as flagged leftovers so callers always receive a complete
order.
"""
from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field

from .levels import LevelTable
from .markov import START

ORACLE_MAX_OBJECTS = 8


@dataclass
class SearchConfig:
    beam_width: int = 5
    max_len: int | None = None  # per-chunk length cap (3 for the capped variant)

    def __post_init__(self):
        if self.beam_width < 1:
            raise ValueError("beam_width must be >= 1")
        if self.max_len is not None and self.max_len < 1:
            raise ValueError("max_len must be >= 1 when set")


@dataclass(frozen=True)
class PlanStep:
    target: str
    level: int
    prob: float
    path: tuple[str, ...]  # intermediates the transition routed through
    chunk: int = 0


@dataclass
class PackingPlan:
    sequence: list[str]
    log_prob: float | None  # None for the random baseline
    steps: list[PlanStep] = field(default_factory=list)
    leftovers: list[str] = field(default_factory=list)

    @property
    def used_fallback(self) -> bool:
        return bool(self.leftovers)

    @property
    def full_order(self) -> list[str]:
        return self.sequence + self.leftovers

    def to_record(self) -> dict:
        return {
            "sequence": list(self.sequence),
            "log_prob": self.log_prob,
            "leftovers": list(self.leftovers),
            "steps": [
                {
                    "target": s.target,
                    "level": s.level,
                    "prob": s.prob,
                    "path": list(s.path),
                    "chunk": s.chunk,
                }
                for s in self.steps
            ],
        }

    @classmethod
    def from_record(cls, rec: dict) -> "PackingPlan":
        return cls(
            sequence=list(rec["sequence"]),
            log_prob=rec["log_prob"],
            steps=[
                PlanStep(s["target"], s["level"], s["prob"], tuple(s["path"]), s["chunk"])
                for s in rec.get("steps", [])
            ],
            leftovers=list(rec.get("leftovers", [])),
        )

    def to_json_line(self) -> str:
        return json.dumps(self.to_record(), sort_keys=True)


@dataclass(frozen=True)
class _Beam:
    packed: tuple[str, ...]
    state: str
    log_prob: float
    remaining: frozenset[str]
    expandable: bool  # some level entry from state targets the remaining set
    steps: tuple[PlanStep, ...] = ()

    def rank_key(self):
        # expandable first, then longer, then more probable, then lexicographic
        return (not self.expandable, -len(self.packed), -self.log_prob, self.packed)


def _can_reach(table: LevelTable, state: str, remaining: frozenset[str]) -> bool:
    if not remaining:
        return False
    return any(
        entry.target in remaining
        for entries in table.levels_from(state).values()
        for entry in entries
    )


def _make_beam(table, packed, state, log_prob, remaining, steps) -> _Beam:
    return _Beam(packed, state, log_prob, remaining, _can_reach(table, state, remaining), steps)


def _search(
    table: LevelTable,
    remaining: frozenset[str],
    start_state: str,
    config: SearchConfig,
    chunk: int = 0,
    round_observer=None,
) -> _Beam:
    """One beam-search pass; returns the best final beam.

    round_observer, when given, is called with the pruned beam list after
    every extension round (a testing seam).
    """
    beams = [_make_beam(table, (), start_state, 0.0, remaining, ())]
    max_level = table.max_level
    while True:
        frozen_len = config.max_len
        if not any(
            b.expandable and (frozen_len is None or len(b.packed) < frozen_len)
            for b in beams
        ):
            break
        extended = False
        for level in range(1, max_level + 1):
            new_beams: list[_Beam] = []
            kept: list[_Beam] = []
            for beam in beams:
                allowed = beam.expandable and (
                    frozen_len is None or len(beam.packed) < frozen_len
                )
                entries = (
                    [e for e in table.at(beam.state, level) if e.target in beam.remaining]
                    if allowed
                    else []
                )
                if not entries:
                    kept.append(beam)
                    continue
                for e in entries:
                    step = PlanStep(e.target, level, e.prob, e.path, chunk)
                    new_beams.append(
                        _make_beam(
                            table,
                            beam.packed + (e.target,),
                            e.target,
                            beam.log_prob + math.log(e.prob),
                            beam.remaining - {e.target},
                            beam.steps + (step,),
                        )
                    )
            if new_beams:
                beams = sorted(kept + new_beams, key=_Beam.rank_key)[: config.beam_width]
                if round_observer is not None:
                    round_observer(beams)
                extended = True
                break
        if not extended:
            break
    return min(beams, key=_Beam.rank_key)


def predict(table: LevelTable, unpacked, config: SearchConfig | None = None) -> PackingPlan:
    """Single beam-search prediction over the unpacked set."""
    if config is None:
        config = SearchConfig()
    remaining = frozenset(unpacked)
    if not remaining:
        raise ValueError("unpacked set is empty")
    best = _search(table, remaining, START, config)
    return PackingPlan(
        sequence=list(best.packed),
        log_prob=best.log_prob,
        steps=list(best.steps),
        leftovers=sorted(best.remaining),
    )


def predict_full(table: LevelTable, unpacked, config: SearchConfig) -> PackingPlan:
    """Chunked prediction: rerun the capped search until the scene is covered.

    Each chunk restarts from the last packed object's state, so transition
    context carries across chunk boundaries; a chunk that packs nothing
    ends the loop and the rest becomes flagged leftovers.
    """
    if config.max_len is None:
        raise ValueError("predict_full requires config.max_len")
    remaining = frozenset(unpacked)
    if not remaining:
        raise ValueError("unpacked set is empty")
    sequence: list[str] = []
    steps: list[PlanStep] = []
    log_prob = 0.0
    state = START
    chunk = 0
    while remaining:
        best = _search(table, remaining, state, config, chunk=chunk)
        if not best.packed:
            break
        sequence.extend(best.packed)
        steps.extend(best.steps)
        log_prob += best.log_prob
        remaining = best.remaining
        state = best.packed[-1]
        chunk += 1
    return PackingPlan(
        sequence=sequence,
        log_prob=log_prob,
        steps=steps,
        leftovers=sorted(remaining),
    )


def random_sequence(unpacked, seed: int) -> PackingPlan:
    """Uniform random permutation baseline; deterministic per seed."""
    objects = sorted(unpacked)
    if not objects:
        raise ValueError("unpacked set is empty")
    rng = random.Random(seed)
    rng.shuffle(objects)
    return PackingPlan(sequence=objects, log_prob=None)


def oracle_best_sequence(table: LevelTable, unpacked) -> PackingPlan:
    """Exhaustive reference search under the same transition semantics.

    Enumerates every sequence reachable by always transitioning at the
    minimum feasible level from the current state and returns the best one
    under (length desc, log-prob desc, lexicographic asc). Factorial blow-up
    is guarded by ORACLE_MAX_OBJECTS.
    """
    remaining = frozenset(unpacked)
    if not remaining:
        raise ValueError("unpacked set is empty")
    if len(remaining) > ORACLE_MAX_OBJECTS:
        raise ValueError(f"oracle limited to {ORACLE_MAX_OBJECTS} objects")
    max_level = table.max_level
    best: list[tuple] = []  # [(key, packed, log_prob, steps)]

    def consider(packed, log_prob, steps):
        key = (-len(packed), -log_prob, packed)
        if not best or key < best[0][0]:
            best[:] = [(key, packed, log_prob, steps)]

    def walk(state, packed, rem, log_prob, steps):
        entries = []
        for level in range(1, max_level + 1):
            entries = [(level, e) for e in table.at(state, level) if e.target in rem]
            if entries:
                break
        if not entries:
            consider(packed, log_prob, steps)
            return
        for level, e in entries:
            step = PlanStep(e.target, level, e.prob, e.path, 0)
            walk(
                e.target,
                packed + (e.target,),
                rem - {e.target},
                log_prob + math.log(e.prob),
                steps + (step,),
            )

    walk(START, (), remaining, 0.0, ())
    _, packed, log_prob, steps = best[0]
    return PackingPlan(
        sequence=list(packed),
        log_prob=log_prob,
        steps=list(steps),
        leftovers=sorted(remaining - set(packed)),
    )


def count_subset_orderings(n: int) -> int:
    """Number of ordered arrangements of every non-empty subset of n items."""
    return sum(math.perm(n, k) for k in range(1, n + 1))
