import itertools

import networkx as nx
import pytest

from displaygraph.core import LabeledGraph, PhyloNetwork, PhyloTree
from displaygraph.formats import parse_newick


def from_nx(G) -> LabeledGraph:
    G = nx.convert_node_labels_to_integers(G, ordering="sorted")
    return LabeledGraph(G.nodes, G.edges)


def path(n):
    return LabeledGraph(range(n), [(i, i + 1) for i in range(n - 1)])


def cycle(n):
    return LabeledGraph(range(n), [(i, (i + 1) % n) for i in range(n)])


def complete(n):
    return LabeledGraph(range(n), itertools.combinations(range(n), 2))


def grid(a, b):
    return from_nx(nx.grid_2d_graph(a, b))


def quartet(newick="((a,b),(c,d));") -> PhyloTree:
    return parse_newick(newick)


def four_cycle_network() -> PhyloNetwork:
    """Square c0..c3 with taxa a, b, c, d hung on its corners in order."""
    labels = {4: "a", 5: "b", 6: "c", 7: "d"}
    edges = [(0, 1), (1, 2), (2, 3), (3, 0), (0, 4), (1, 5), (2, 6), (3, 7)]
    return PhyloNetwork(LabeledGraph(range(8), edges, labels))


def _canon(G):
    return nx.weisfeiler_lehman_graph_hash(G, iterations=4)


def connected_cubic_graphs(max_n):
    """All connected simple cubic graphs on at most ``max_n`` vertices, up to
    isomorphism. Every connected graph has a breadth-first labelling, so it
    suffices to grow graphs in which each processed vertex takes its missing
    neighbours from already discovered vertices or from fresh labels."""
    out = {}
    for n in range(4, max_n + 1, 2):
        found: dict[str, list] = {}

        def grow(i, deg, edges, nxt):
            if i == n:
                G = nx.Graph(edges)
                bucket = found.setdefault(_canon(G), [])
                if not any(nx.is_isomorphic(G, K) for K in bucket):
                    bucket.append(G)
                return
            if i >= nxt:
                return
            need = 3 - deg[i]
            adj = {v for e in edges for v in e if i in e} - {i}
            old = [j for j in range(i + 1, nxt) if deg[j] < 3 and j not in adj]
            for s in range(min(need, len(old)) + 1):
                fresh = need - s
                if nxt + fresh > n:
                    continue
                for pick in itertools.combinations(old, s):
                    new_nb = list(pick) + list(range(nxt, nxt + fresh))
                    deg2 = deg[:]
                    deg2[i] = 3
                    for j in new_nb:
                        deg2[j] += 1
                    grow(i + 1, deg2, edges + [(i, j) for j in new_nb], nxt + fresh)

        grow(0, [0] * n, [], 1)
        out[n] = [from_nx(G) for b in found.values() for G in b]
    return out


@pytest.fixture(scope="session")
def cubic_corpus():
    return connected_cubic_graphs(10)


# one line per acceptance criterion, filled by test_acceptance.py
ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
