import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import complete, from_nx
from displaygraph.core import LabeledGraph, build_display_graph, suppress
from displaygraph.errors import InvalidPartition, NotCubic, NotSimple
from displaygraph.generators import random_tree_pair
from displaygraph.recognition import (
    brute_force_tree_bipartition,
    is_display_graph,
    isomorphic,
    reconstruct_trees,
    tree_arboricity_two,
)


def test_corpus_counts(cubic_corpus):
    assert {n: len(gs) for n, gs in cubic_corpus.items()} == {4: 1, 6: 2, 8: 5, 10: 19}


def test_k4_is_a_display_graph():
    v = is_display_graph(complete(4))
    assert v.status == "yes" and len(v.taxa) == 4
    t1, t2 = v.trees
    assert isomorphic(suppress(build_display_graph(t1, t2).graph), complete(4))


@pytest.mark.parametrize(
    "g", [from_nx(nx.petersen_graph()), from_nx(nx.complete_bipartite_graph(3, 3))]
)
def test_known_graphs_against_brute_force(g):
    assert (tree_arboricity_two(g) is None) == (brute_force_tree_bipartition(g) is None)


def test_petersen_verdict():
    v = is_display_graph(from_nx(nx.petersen_graph()))
    assert v.status in {"yes", "no"}
    assert bool(v) == (brute_force_tree_bipartition(from_nx(nx.petersen_graph())) is not None)


def test_corpus_agrees_with_brute_force(cubic_corpus):
    for n, graphs in cubic_corpus.items():
        for g in graphs:
            fast = tree_arboricity_two(g)
            slow = brute_force_tree_bipartition(g)
            assert (fast is None) == (slow is None)
            if fast is not None:
                t1, t2 = reconstruct_trees(g, fast)
                assert len(t1.taxa) == n // 2 + 2


def test_rejects_non_cubic():
    k5 = complete(5)
    assert is_display_graph(k5).status == "no"
    with pytest.raises(NotCubic):
        tree_arboricity_two(k5)
    multi = LabeledGraph(range(2), [(0, 1)] * 3)
    with pytest.raises(NotSimple):
        tree_arboricity_two(multi)


def test_bad_partitions():
    g = complete(4)
    with pytest.raises(InvalidPartition):
        reconstruct_trees(g, ({0, 1}, {1, 2, 3}))
    # a forest side (two isolated vertices) is not a tree
    cube = from_nx(nx.hypercube_graph(3))
    with pytest.raises(InvalidPartition):
        reconstruct_trees(cube, ({0, 7}, set(cube.vertices) - {0, 7}))


@settings(max_examples=40, deadline=None)
@given(st.integers(4, 10), st.integers(0, 10**6))
def test_round_trip_of_random_pairs(k, seed):
    t1, t2 = random_tree_pair(k, seed)
    g = suppress(build_display_graph(t1, t2).graph)
    v = is_display_graph(g)
    assert v.status == "yes"
    a, b = v.trees
    assert len(a.taxa) == k
    assert isomorphic(suppress(build_display_graph(a, b).graph), g)
