"""Seeded random instances: trees, networks, displayed trees, and the
re-leafed D(T, T) family (treewidth 2, unbounded level)."""

from __future__ import annotations

import random

from .core import LabeledGraph, PhyloNetwork, PhyloTree, build_display_graph
from .display import restrict_and_suppress


def _rng(seed) -> random.Random:
    return seed if isinstance(seed, random.Random) else random.Random(seed)


def taxon_names(k: int) -> list[str]:
    width = len(str(k))
    return [f"x{i + 1:0{width}d}" for i in range(k)]


def random_tree(taxa, seed=None) -> PhyloTree:
    """Stepwise addition: each new taxon subdivides a uniformly random edge."""
    rng = _rng(seed)
    taxa = list(taxa) if not isinstance(taxa, int) else taxon_names(taxa)
    if len(taxa) == 1:
        return PhyloTree(LabeledGraph([0], [], {0: taxa[0]}))
    if len(taxa) == 2:
        return PhyloTree(LabeledGraph([0, 1], [(0, 1)], {0: taxa[0], 1: taxa[1]}))
    order = taxa[:]
    rng.shuffle(order)
    labels = {0: order[0], 1: order[1], 2: order[2]}
    edges = [(3, 0), (3, 1), (3, 2)]
    nxt = 4
    for x in order[3:]:
        a, b = edges.pop(rng.randrange(len(edges)))
        mid, leaf = nxt, nxt + 1
        nxt += 2
        edges += [(a, mid), (mid, b), (mid, leaf)]
        labels[leaf] = x
    return PhyloTree(LabeledGraph(range(nxt), edges, labels))


def add_reticulations(t_or_n, r: int, seed=None) -> PhyloNetwork:
    """Add r edges, each joining midpoints of two distinct existing edges."""
    rng = _rng(seed)
    g = t_or_n.graph
    edges = list(g.edges)
    nxt = max(g.vertices) + 1
    for _ in range(r):
        i, j = rng.sample(range(len(edges)), 2)
        (a, b), (c, d) = edges[i], edges[j]
        for k in sorted((i, j), reverse=True):
            edges.pop(k)
        s, t = nxt, nxt + 1
        nxt += 2
        edges += [(a, s), (s, b), (c, t), (t, d), (s, t)]
    return PhyloNetwork(LabeledGraph(range(nxt), edges, g.labels).relabel_dense()[0])


def random_network(taxa, r: int, seed=None) -> PhyloNetwork:
    rng = _rng(seed)
    return add_reticulations(random_tree(taxa, rng), r, rng)


def random_spanning_tree(g: LabeledGraph, seed=None) -> LabeledGraph:
    rng = _rng(seed)
    edges = list(g.edges)
    rng.shuffle(edges)
    parent = {v: v for v in g.vertices}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    keep = []
    for u, v in edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            keep.append((u, v))
    return LabeledGraph(g.vertices, keep, g.labels, g.names)


def random_displayed_tree(n: PhyloNetwork, seed=None) -> PhyloTree:
    """Restriction of a random spanning tree of n; n displays it."""
    tree = restrict_and_suppress(random_spanning_tree(n.graph, seed), n.taxa)
    return PhyloTree(tree.graph.relabel_dense()[0])


def has_common_cherry(t1: PhyloTree, t2: PhyloTree) -> bool:
    return bool(cherries(t1) & cherries(t2))


def cherries(t: PhyloTree) -> set[frozenset[str]]:
    g = t.graph
    out = set()
    for v in g.vertices:
        if v in g.labels:
            continue
        leaves = [g.labels[w] for w in g.neighbors(v) if w in g.labels]
        for i in range(len(leaves)):
            for j in range(i + 1, len(leaves)):
                out.add(frozenset((leaves[i], leaves[j])))
    return out


def random_tree_pair(k: int, seed=None, max_tries: int = 10_000) -> tuple[PhyloTree, PhyloTree]:
    """Two random trees on k taxa without a common cherry (k >= 4)."""
    rng = _rng(seed)
    taxa = taxon_names(k)
    for _ in range(max_tries):
        t1, t2 = random_tree(taxa, rng), random_tree(taxa, rng)
        if not has_common_cherry(t1, t2):
            return t1, t2
    raise RuntimeError("no cherry-free pair found")


def releafed_self_display(t: PhyloTree) -> PhyloNetwork:
    """D(T, T) with a fresh leaf hung on every (degree-2) taxon vertex.

    The result is a network of treewidth 2 whose level grows with |X|.
    """
    d = build_display_graph(t, t).graph
    nxt = d.n
    edges = list(d.edges)
    labels = {}
    for v, x in sorted(d.labels.items()):
        edges.append((v, nxt))
        labels[nxt] = x
        nxt += 1
    return PhyloNetwork(LabeledGraph(range(nxt), edges, labels))
