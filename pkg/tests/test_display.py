import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import four_cycle_network, quartet
from displaygraph.constructions import grid_embedding, grid_network, grid_tree
from displaygraph.core import LabeledGraph, PhyloNetwork, PhyloTree
from displaygraph.display import (
    EmbeddingCertificate,
    Quartet,
    SearchStats,
    displays_via_quartets,
    find_display,
    identity_certificate,
    labeled_tree_isomorphic,
    quartet_set,
    quartets_of_tree_graph,
    restrict_and_suppress,
    verify_embedding,
)
from displaygraph.errors import LimitExceeded, TaxonMismatch, TaxonMissing, TooFewTaxa
from displaygraph.formats import parse_newick
from displaygraph.generators import random_displayed_tree, random_network, random_tree


def _spanning_restrictions(n):
    """Every tree topology obtainable from a spanning tree of n (oracle)."""
    g = n.graph
    r = g.m - g.n + 1
    out = set()
    from displaygraph.display import canonical_form

    for drop in itertools.combinations(range(g.m), r):
        keep = [e for i, e in enumerate(g.edges) if i not in drop]
        sub = LabeledGraph(g.vertices, keep, g.labels)
        if sub.is_connected():
            out.add(canonical_form(restrict_and_suppress(sub, n.taxa)))
    return out


def test_identity_certificate_verifies():
    t = quartet()
    assert verify_embedding(PhyloNetwork.from_tree(t), t, identity_certificate(t)).valid


def test_grid_embeddings_verify():
    for p in [(2, 7), (4, 11)]:
        cert = grid_embedding(p)
        n = grid_network(p)
        assert verify_embedding(n, grid_tree(p), cert).valid
        assert len(cert.image_edges) == len(cert.image_vertices()) - 1


def test_overlapping_fibres_reported():
    t = quartet()
    n = PhyloNetwork.from_tree(t)
    cert = identity_certificate(t)
    inner = [v for v in t.graph.vertices if v not in t.graph.labels]
    bad = dict(cert.vertex_map)
    bad[inner[0]] = inner[1]
    rep = verify_embedding(n, t, EmbeddingCertificate(cert.image_edges, bad))
    assert not rep.valid
    assert {"surjective", "condition3"} <= rep.kinds()


def test_disconnected_fibre_reported():
    n = four_cycle_network()
    t = quartet("((a,b),(c,d));")
    cert = find_display(n, t)
    f = dict(cert.vertex_map)
    # move a taxon image onto a non-adjacent branch point's fibre
    a = n.graph.vertex_of_label("a")
    c_tree = t.graph.vertex_of_label("c")
    f[a] = c_tree
    rep = verify_embedding(n, t, EmbeddingCertificate(cert.image_edges, f))
    assert "condition1" in rep.kinds() and "condition2" in rep.kinds()


def test_find_display_identity():
    t = random_tree(8, seed=2)
    n = PhyloNetwork.from_tree(t)
    cert = find_display(n, t)
    assert cert == identity_certificate(t)


def test_find_display_grid():
    n, t = grid_network((2, 7)), grid_tree((2, 7))
    cert = find_display(n, t)
    assert cert is not None and verify_embedding(n, t, cert).valid


def test_four_cycle_network():
    n = four_cycle_network()
    shapes = _spanning_restrictions(n)
    assert len(shapes) == 2
    yes = [quartet("((a,b),(c,d));"), quartet("((a,d),(b,c));")]
    no = quartet("((a,c),(b,d));")
    for t in yes:
        assert find_display(n, t) is not None
        assert displays_via_quartets(n, t)
    assert find_display(n, no) is None
    assert not displays_via_quartets(n, no)


def test_find_display_limit_is_distinct_from_no():
    # a displayed tree needs at least r + 1 nodes to reach a leaf
    rng = random.Random(9)
    n = random_network(8, 4, rng)
    t = random_displayed_tree(n, rng)
    assert find_display(n, t) is not None
    with pytest.raises(LimitExceeded) as info:
        find_display(n, t, node_limit=2)
    assert info.value.stats["nodes"] == 3


def test_find_display_preconditions():
    with pytest.raises(TaxonMismatch):
        find_display(four_cycle_network(), quartet("((a,b),(c,e));"))


def test_restrict_and_suppress_examples():
    t = random_tree(6, seed=4)
    assert labeled_tree_isomorphic(restrict_and_suppress(t.graph, t.taxa), t)
    # caterpillar with an unlabelled pendant path
    edges = [(0, 1), (1, 2), (0, 10), (0, 11), (1, 12), (2, 13), (2, 14), (1, 20), (20, 21)]
    labels = {10: "a", 11: "b", 12: "c", 13: "d", 14: "e"}
    g = LabeledGraph([0, 1, 2, 10, 11, 12, 13, 14, 20, 21], edges, labels)
    out = restrict_and_suppress(g, "abcde")
    assert out.graph.n == 8 and 20 not in out.graph
    # subdivided star on three taxa
    star = LabeledGraph(range(7), [(0, 1), (1, 2), (0, 3), (3, 4), (0, 5), (5, 6)], {2: "a", 4: "b", 6: "c"})
    out = restrict_and_suppress(star, "abc")
    assert out.graph.n == 4
    with pytest.raises(TaxonMissing):
        restrict_and_suppress(star, "abz")


def test_quartets_examples():
    assert quartet_set(quartet()) == {Quartet.of("a", "b", "c", "d")}
    cat = parse_newick("((a,b),c,(d,e));")
    qs = quartet_set(cat)
    assert len(qs) == 5
    assert Quartet.of("a", "b", "d", "e") in qs
    assert len(quartet_set(grid_tree((2, 7)))) == 1001
    with pytest.raises(TooFewTaxa):
        quartet_set(parse_newick("(a,b,c);"))


def test_quartet_canonical_form():
    q = Quartet.of("d", "c", "b", "a")
    assert (q.a, q.b, q.c, q.d) == ("a", "b", "c", "d")
    assert str(q) == "a,b|c,d"
    assert Quartet.of("c", "d", "a", "b") == q


def test_grid_tree_quartets_against_splits():
    # a|b splits the tree iff every quartet ab|cd with a,b on one side is present
    t = grid_tree((2, 7))
    qs = quartet_set(t)
    from displaygraph.display import tree_splits

    for side in tree_splits(t):
        other = set(t.taxa) - side
        if len(side) >= 2 and len(other) >= 2:
            a, b = sorted(side)[:2]
            c, d = sorted(other)[:2]
            assert Quartet.of(a, b, c, d) in qs


def test_isomorphism_examples():
    t = random_tree(9, seed=5)
    assert labeled_tree_isomorphic(t, t)
    assert not labeled_tree_isomorphic(quartet("((a,b),(c,d));"), quartet("((a,c),(b,d));"))
    g = t.graph
    perm = list(g.vertices)
    random.Random(1).shuffle(perm)
    shuffled = PhyloTree(LabeledGraph(g.vertices, [(perm[u], perm[v]) for u, v in g.edges],
                                      {perm[v]: x for v, x in g.labels.items()}))
    assert labeled_tree_isomorphic(t, shuffled)
    with pytest.raises(TaxonMismatch):
        labeled_tree_isomorphic(quartet(), quartet("((a,b),(c,e));"))


def test_quartets_of_spanning_graph_ignore_pendant_junk():
    t = random_tree(6, seed=8)
    g = t.graph
    extra = max(g.vertices) + 1
    u, v = g.edges[0]
    edges = [e for e in g.edges if e != (u, v)] + [(u, extra), (extra, v), (extra, extra + 1)]
    h = LabeledGraph(list(g.vertices) + [extra, extra + 1], edges, g.labels)
    assert quartets_of_tree_graph(h, t.taxa) == quartet_set(t)


@settings(max_examples=60, deadline=None)
@given(st.integers(4, 8), st.integers(0, 10**6))
def test_compatible_iff_same_quartets(k, seed):
    t1, t2 = random_tree(k, seed), random_tree(k, seed + 1)
    assert (quartet_set(t1) == quartet_set(t2)) == labeled_tree_isomorphic(t1, t2)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_find_display_agrees_with_oracles(seed):
    rng = random.Random(seed)
    r = rng.randint(0, 3)
    n = random_network(rng.randint(4, 7 - r if r < 3 else 4), r, rng)
    t = random_displayed_tree(n, rng) if rng.random() < 0.5 else random_tree(n.taxa, rng)
    stats = SearchStats()
    cert = find_display(n, t, stats=stats)
    assert (cert is not None) == displays_via_quartets(n, t)
    from displaygraph.display import canonical_form

    assert (cert is not None) == (canonical_form(t) in _spanning_restrictions(n))
    if cert is not None:
        assert verify_embedding(n, t, cert).valid


def test_displayed_level2_network_true():
    rng = random.Random(3)
    n = random_network(6, 2, rng)
    t = random_displayed_tree(n, rng)
    assert displays_via_quartets(n, t)
    assert find_display(n, t) is not None


def test_quartet_oracle_limit():
    n = random_network(8, 4, seed=1)
    with pytest.raises(LimitExceeded):
        displays_via_quartets(n, random_tree(n.taxa, 2), limit=10)
