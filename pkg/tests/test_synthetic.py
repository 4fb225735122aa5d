import pytest

from packseq.markov import START, MarkovChain
from packseq.synthetic import synth_demos
from util import full_set_container, make_catalog


def test_synth_zero_demos():
    chain = MarkovChain({START: [("a", 1.0)]})
    catalog = make_catalog(["a"])
    container = full_set_container(1)
    assert synth_demos(chain, catalog, container, n=0, seed=0) == []


def test_synth_requires_catalog_coverage():
    chain = MarkovChain({START: [("a", 1.0)]})
    catalog = make_catalog(["a", "b"])
    with pytest.raises(ValueError, match="b"):
        synth_demos(chain, catalog, full_set_container(2), n=1, seed=0)


def test_synth_deterministic_walk_is_forced():
    chain = MarkovChain({START: [("a", 1.0)], "a": [("b", 1.0)], "b": [("c", 1.0)]})
    catalog = make_catalog(["a", "b", "c"])
    demos = synth_demos(chain, catalog, full_set_container(3), n=25, seed=4)
    for d in demos:
        assert d.sequence == ["a", "b", "c"]
        assert d.fallback_steps == []
        assert d.duration_s >= 0


def test_synth_same_seed_same_demos():
    chain = MarkovChain({START: [("a", 0.5), ("b", 0.5)]})
    catalog = make_catalog(["a", "b"])
    container = full_set_container(2)
    one = synth_demos(chain, catalog, container, n=20, seed=9)
    two = synth_demos(chain, catalog, container, n=20, seed=9)
    assert one == two


def test_synth_two_branch_start_frequencies():
    chain = MarkovChain({START: [("a", 0.7), ("b", 0.3)]})
    catalog = make_catalog(["a", "b"])
    container = full_set_container(2)
    demos = synth_demos(chain, catalog, container, n=10_000, seed=0)
    first_a = sum(1 for d in demos if d.sequence[0] == "a") / len(demos)
    assert abs(first_a - 0.7) < 0.02
    assert abs((1 - first_a) - 0.3) < 0.02
    # the second step has no chain transition and is flagged as a fallback
    for d in demos[:100]:
        assert d.fallback_steps == [1]


def test_synth_sequences_cover_scene_without_repeats():
    chain = MarkovChain(
        {START: [("a", 0.5), ("b", 0.5)], "a": [("b", 1.0)], "b": [("c", 1.0)]}
    )
    catalog = make_catalog(["a", "b", "c"])
    demos = synth_demos(chain, catalog, full_set_container(3), n=200, seed=2)
    for d in demos:
        assert sorted(d.sequence) == ["a", "b", "c"]
        assert len(set(d.sequence)) == 3


def test_synth_negative_n():
    chain = MarkovChain({START: [("a", 1.0)]})
    with pytest.raises(ValueError):
        synth_demos(chain, make_catalog(["a"]), full_set_container(1), n=-1, seed=0)
