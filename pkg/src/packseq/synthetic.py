"""Synthetic demonstrations drawn from a known ground-truth chain.

Used as the learning oracle: scenes come from the volume-band sampler and
each sequence is a random walk on the ground-truth chain restricted to the
scene's not-yet-packed objects. When the current state has no direct
transition into the remaining set, the walk falls back to a uniform pick
and flags that step index on the demonstration.
"""
from __future__ import annotations

import random

from .catalog import ContainerSpec, Demonstration, ObjectCatalog, sample_scene
from .markov import START, MarkovChain

# Duration model: a setup constant plus a per-object increment, with noise.
_BASE_DURATION_S = 5.0
_PER_OBJECT_S = 4.0
_DURATION_NOISE_S = 3.0


def synth_demos(
    ground_truth: MarkovChain,
    catalog: ObjectCatalog,
    container: ContainerSpec,
    n: int,
    seed: int,
    participant_id: str = "synth",
) -> list[Demonstration]:
    if n < 0:
        raise ValueError("n must be >= 0")
    missing = sorted(set(catalog.ids) - ground_truth.objects)
    if missing:
        raise ValueError(f"ground-truth chain does not cover catalog objects: {missing}")
    rng = random.Random(seed)
    demos = []
    for i in range(n):
        scene = sample_scene(catalog, container, seed=rng.randrange(2**63))
        sequence, fallback_steps = _walk(ground_truth, scene, rng)
        duration = max(
            0.0,
            _BASE_DURATION_S
            + _PER_OBJECT_S * len(sequence)
            + rng.gauss(0.0, _DURATION_NOISE_S),
        )
        demos.append(
            Demonstration(
                scene_id=f"synth-{i:05d}",
                participant_id=participant_id,
                sequence=sequence,
                duration_s=duration,
                fallback_steps=fallback_steps,
            )
        )
    return demos


def _walk(chain: MarkovChain, scene: set[str], rng: random.Random):
    remaining = set(scene)
    state = START
    sequence: list[str] = []
    fallback_steps: list[int] = []
    while remaining:
        options = [(t, p) for t, p in chain.targets(state) if t in remaining]
        if options:
            targets, weights = zip(*options)
            choice = rng.choices(targets, weights=weights)[0]
        else:
            choice = rng.choice(sorted(remaining))
            fallback_steps.append(len(sequence))
        sequence.append(choice)
        remaining.remove(choice)
        state = choice
    return sequence, fallback_steps
