"""Shared test helpers: fixture builders and brute-force oracles."""
from __future__ import annotations

import random

from packseq.catalog import CatalogObject, ContainerSpec, Demonstration, ObjectCatalog
from packseq.markov import START, MarkovChain


def make_catalog(ids, side: float = 0.1) -> ObjectCatalog:
    """Catalog of equal-volume cubes, one per id."""
    return ObjectCatalog(
        CatalogObject(i, i.replace("_", " ").title(), (side, side, side)) for i in ids
    )


def full_set_container(n_objects: int, side: float = 0.1) -> ContainerSpec:
    """Container sized so only the full n-object set satisfies the volume band.

    With equal volumes v and container volume n*v/0.8, a subset of k objects
    has ratio 0.8*k/n, which is inside [0.7, 0.9] only for k = n (n <= 7).
    """
    assert n_objects <= 7
    vol = n_objects * side**3 / 0.8
    return ContainerSpec(side, side, vol / side**2)


def demo(scene_id: str, sequence, duration: float = 30.0, **kw) -> Demonstration:
    return Demonstration(scene_id, "p00", list(sequence), duration, **kw)


def random_chain(rng: random.Random, n_objects: int, edge_prob: float = 0.45) -> MarkovChain:
    """Random normalized chain over n_objects states plus the start state."""
    objects = [f"o{i}" for i in range(n_objects)]
    edges = {}
    for source in [START] + objects:
        targets = [o for o in objects if o != source and rng.random() < edge_prob]
        if source == START and not targets:
            targets = [rng.choice(objects)]
        if not targets:
            continue
        weights = [rng.uniform(0.05, 1.0) for _ in targets]
        total = sum(weights)
        edges[source] = [(t, w / total) for t, w in zip(targets, weights)]
    return MarkovChain(edges)


def enumerate_level_entries(chain: MarkovChain, source: str, max_level: int):
    """Brute-force level table for one source via simple-path enumeration.

    Returns {level: {target: (prob, intermediates)}} where the probability is
    the max over simple paths of the target's shortest length, products taken
    left to right, ties broken on the lexicographically smallest path.
    """
    adjacency = {s: chain.targets(s) for s in chain.states}
    found: dict[str, list[tuple[int, float, tuple[str, ...]]]] = {}

    def dfs(node, visited, prob, inter, depth):
        if depth >= max_level:
            return
        for target, p in adjacency.get(node, ()):
            if target in visited:
                continue
            path_prob = prob * p
            found.setdefault(target, []).append((depth + 1, path_prob, inter))
            dfs(target, visited | {target}, path_prob, inter + (target,), depth + 1)

    dfs(source, {source}, 1.0, (), 0)
    levels: dict[int, dict[str, tuple[float, tuple[str, ...]]]] = {}
    for target, paths in found.items():
        best_len = min(p[0] for p in paths)
        at_len = [p for p in paths if p[0] == best_len]
        best_prob = max(p[1] for p in at_len)
        inter = min(p[2] for p in at_len if p[1] == best_prob)
        levels.setdefault(best_len, {})[target] = (best_prob, inter)
    return levels
