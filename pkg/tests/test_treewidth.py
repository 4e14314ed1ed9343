import itertools
import random

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import complete, cycle, from_nx, grid, path, quartet
from displaygraph.constructions import grid_network, grid_path_decomposition
from displaygraph.core import LabeledGraph, build_display_graph, suppress_with_chains
from displaygraph.errors import BudgetExceeded
from displaygraph.generators import random_tree
from displaygraph.treewidth import (
    TreeDecomposition,
    exact_treewidth,
    heuristic_ub,
    lower_bound_mmd,
    validate_decomposition,
)


def _random_graph(rng, n, p):
    edges = [e for e in itertools.combinations(range(n), 2) if rng.random() < p]
    return LabeledGraph(range(n), edges)


def test_single_bag_is_valid():
    g = cycle(5)
    rep = validate_decomposition(g, TreeDecomposition([set(g.vertices)], []))
    assert rep.valid and rep.width == 4


def test_missing_edge_bag_reports_edge():
    g = cycle(4)
    td = TreeDecomposition([{0, 1, 2}, {0, 2}], [(0, 1)])
    rep = validate_decomposition(g, td)
    assert not rep.valid
    assert {(v.kind, v.witness) for v in rep.violations} >= {("tw2", (2, 3)), ("tw2", (0, 3))}
    assert "tw1" in rep.kinds()


def test_disconnected_trace_reports_vertex():
    g = path(3)
    td = TreeDecomposition([{0, 1}, {2}, {1, 2}], [(0, 1), (1, 2)])
    rep = validate_decomposition(g, td)
    assert [v.witness for v in rep.violations if v.kind == "tw3"] == [1]


def test_bad_tree_shape_reported():
    g = path(3)
    td = TreeDecomposition([{0, 1}, {1, 2}, {2}], [(0, 1), (1, 2), (0, 2)])
    assert "tree" in validate_decomposition(g, td).kinds()


def test_grid_path_decomposition_replay_validates():
    td = grid_path_decomposition((4, 11))
    rep = validate_decomposition(grid_network((4, 11)).graph, td)
    assert rep.valid and td.width == 4


@pytest.mark.parametrize(
    "g,expected",
    [
        (path(5), 1),
        (complete(4), 3),
        (complete(6), 5),
        (cycle(7), 2),
        (grid(3, 3), 3),
        (grid(4, 4), 4),
        (from_nx(nx.petersen_graph()), 4),
    ],
)
def test_exact_known_values(g, expected):
    w, td = exact_treewidth(g)
    assert w == expected
    rep = validate_decomposition(g, td)
    assert rep.valid and td.width == w


def test_heuristics():
    t = random_tree(9, seed=1).graph
    assert heuristic_ub(t).width == 1
    for strategy in ("min-degree", "min-fill"):
        assert heuristic_ub(complete(5), strategy).width == 4
    ub = heuristic_ub(grid_network((2, 7)).graph)
    assert validate_decomposition(grid_network((2, 7)).graph, ub).valid
    assert ub.width >= 2


def test_lower_bound_examples():
    assert lower_bound_mmd(complete(4)) >= 3
    assert lower_bound_mmd(random_tree(6, seed=0).graph) == 1
    assert lower_bound_mmd(cycle(5)) == 2


def test_exact_on_grid_network():
    w, _ = exact_treewidth(grid_network((2, 7)).graph)
    assert w == 2


def test_display_graph_of_tree_with_itself():
    for k in (3, 4, 7, 12):
        t = random_tree(k, seed=k)
        w, _ = exact_treewidth(build_display_graph(t, t).graph)
        assert w == 2


def test_budget_exceeded_carries_bounds():
    g = grid(9, 9)
    with pytest.raises(BudgetExceeded) as info:
        exact_treewidth(g, budget=10, node_limit=5)
    exc = info.value
    assert exc.lb <= 9 <= exc.ub
    assert validate_decomposition(g, exc.decomposition).valid


def test_branch_and_bound_matches_dp():
    rng = random.Random(11)
    for _ in range(12):
        g = _random_graph(rng, rng.randint(8, 16), 0.35)
        a, _ = exact_treewidth(g, budget=24)
        b, td = exact_treewidth(g, budget=0)
        assert a == b
        assert validate_decomposition(g, td).valid and td.width == b


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 11), st.floats(0.15, 0.7), st.integers(0, 10**6))
def test_bounds_sandwich(n, p, seed):
    g = _random_graph(random.Random(seed), n, p)
    w, td = exact_treewidth(g)
    assert validate_decomposition(g, td).valid
    assert lower_bound_mmd(g) <= w <= heuristic_ub(g).width


@settings(max_examples=30, deadline=None)
@given(st.integers(3, 10), st.floats(0.2, 0.6), st.integers(0, 10**6))
def test_blocks_and_edge_addition(n, p, seed):
    rng = random.Random(seed)
    g = _random_graph(rng, n, p)
    w, _ = exact_treewidth(g)
    if g.n >= 2:
        comps = [g.induced_subgraph(c) for c in g.components() if len(c) > 1]
        from displaygraph.core import block_vertex_sets

        per_block = [
            exact_treewidth(c.induced_subgraph(b))[0] for c in comps for b in block_vertex_sets(c)
        ]
        assert w == max(per_block, default=0)
    missing = [e for e in itertools.combinations(range(n), 2) if not g.has_edge(*e)]
    if missing:
        e = rng.choice(missing)
        h = LabeledGraph(g.vertices, list(g.edges) + [e])
        assert exact_treewidth(h)[0] <= w + 1


@settings(max_examples=30, deadline=None)
@given(st.integers(4, 12), st.floats(0.25, 0.6), st.integers(0, 10**6))
def test_pruning_and_suppression_preserve_treewidth(n, p, seed):
    rng = random.Random(seed)
    g = _random_graph(rng, n, p)
    # hang a pendant path and subdivide an edge, then undo both
    extra = list(g.edges)
    if not extra:
        return
    a, b = extra[0]
    edges = extra[1:] + [(a, n), (n, b), (a, n + 1), (n + 1, n + 2)]
    h = LabeledGraph(range(n + 3), edges)
    w = exact_treewidth(g)[0]
    if w < 2:
        return
    pruned = h.induced_subgraph(set(h.vertices) - {n + 1, n + 2})
    s, _ = suppress_with_chains(pruned)
    assert exact_treewidth(h)[0] == w
    assert exact_treewidth(s)[0] == exact_treewidth(g.simple())[0] or not s.is_simple()
