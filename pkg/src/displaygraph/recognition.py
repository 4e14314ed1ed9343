"""Recognising suppressed display graphs of two trees.

A simple cubic graph is such a graph exactly when its vertices split into
two sets that each induce a tree; the crossing edges become the taxa.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field

import networkx as nx

from .core import LabeledGraph, PhyloTree, build_display_graph, suppress
from .errors import (
    Disconnected,
    DisplayGraphError,
    InvalidPartition,
    LimitExceeded,
    NotCubic,
    NotSimple,
)


def _require_cubic(g: LabeledGraph) -> None:
    if not g.is_simple():
        raise NotSimple("graph has parallel edges")
    bad = [v for v in g.vertices if g.degree(v) != 3]
    if bad:
        raise NotCubic(f"vertex {bad[0]} has degree {g.degree(bad[0])}")
    if not g.is_connected():
        raise Disconnected("graph is not connected")


def tree_arboricity_two(g: LabeledGraph, node_limit: int | None = 10_000_000):
    """Split V into (V1, V2), each inducing a tree, or None if impossible.

    Vertices are assigned in BFS order. A branch dies when an assignment
    closes a cycle inside one side, or when a side gets a component that is
    already surrounded by the other side while that side also has vertices
    elsewhere. The first vertex is fixed to V1.
    """
    _require_cubic(g)
    order = _bfs_order(g)
    nbrs = {v: g.neighbors(v) for v in g.vertices}
    side: dict[int, int] = {}
    count = [0, 0]
    parent: dict[int, int] = {}
    nodes = [0]

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    def closed_component_ok(w, s) -> bool:
        """Component of w in side s: fine unless it has no unassigned
        neighbour and is not the whole side."""
        comp = {w}
        stack = [w]
        while stack:
            x = stack.pop()
            for y in nbrs[x]:
                sy = side.get(y)
                if sy is None:
                    return True
                if sy == s and y not in comp:
                    comp.add(y)
                    stack.append(y)
        return len(comp) == count[s]

    def place(k: int) -> bool:
        nodes[0] += 1
        if node_limit is not None and nodes[0] > node_limit:
            raise LimitExceeded("tree-arboricity search budget exhausted", {"nodes": nodes[0]})
        if k == len(order):
            return _both_trees(g, side)
        v = order[k]
        for s in ((0,) if k == 0 else (0, 1)):
            roots = set()
            cycle = False
            for w in nbrs[v]:
                if side.get(w) == s:
                    r = find(w)
                    if r in roots:
                        cycle = True
                        break
                    roots.add(r)
            if cycle:
                continue
            side[v] = s
            count[s] += 1
            parent[v] = v
            undo = []
            for r in roots:
                undo.append(r)
                parent[r] = v
            ok = closed_component_ok(v, s) and all(
                closed_component_ok(w, side[w]) for w in nbrs[v] if side.get(w) == 1 - s
            )
            if ok and place(k + 1):
                return True
            for r in undo:
                parent[r] = r
            del parent[v]
            count[s] -= 1
            del side[v]
        return False

    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 4 * len(order) + 100))
    try:
        found = place(0)
    finally:
        sys.setrecursionlimit(old)
    if not found:
        return None
    v1 = frozenset(v for v, s in side.items() if s == 0)
    v2 = frozenset(v for v, s in side.items() if s == 1)
    return v1, v2


def _bfs_order(g: LabeledGraph) -> list[int]:
    start = min(g.vertices)
    seen = {start}
    order = [start]
    for x in order:
        for y in sorted(g.neighbors(x)):
            if y not in seen:
                seen.add(y)
                order.append(y)
    return order


def _both_trees(g: LabeledGraph, side) -> bool:
    for s in (0, 1):
        part = [v for v, t in side.items() if t == s]
        if not part or not g.induced_subgraph(part).is_tree():
            return False
    return True


def brute_force_tree_bipartition(g: LabeledGraph):
    """All 2^|V| splits; for testing the search."""
    vs = list(g.vertices)
    for mask in range(1 << (len(vs) - 1)):
        side = {v: (mask >> i) & 1 for i, v in enumerate(vs)}
        if _both_trees(g, side):
            return (frozenset(v for v in vs if side[v] == 0), frozenset(v for v in vs if side[v] == 1))
    return None


def reconstruct_trees(g: LabeledGraph, part) -> tuple[PhyloTree, PhyloTree]:
    """Trees T1, T2 with suppress(D(T1, T2)) isomorphic to g.

    Each crossing edge {v, u} (v in V1) becomes taxon ``t<k>``: a pendant
    leaf at v in T1 and at u in T2.
    """
    v1, v2 = (frozenset(p) for p in part)
    if v1 & v2 or (v1 | v2) != set(g.vertices):
        raise InvalidPartition("sides must partition the vertex set")
    for name, vs in (("V1", v1), ("V2", v2)):
        if not vs or not g.induced_subgraph(vs).is_tree():
            raise InvalidPartition(f"{name} does not induce a tree")
    crossing = sorted(e if e[0] in v1 else (e[1], e[0]) for e in g.edges if (e[0] in v1) != (e[1] in v1))
    mu1 = sum(3 - g.induced_subgraph(v1).degree(v) for v in v1)
    mu2 = sum(3 - g.induced_subgraph(v2).degree(v) for v in v2)
    assert mu1 == mu2 == len(crossing), (mu1, mu2, len(crossing))
    width = len(str(len(crossing)))
    taxa = [f"t{k + 1:0{width}d}" for k in range(len(crossing))]
    trees = []
    for s, vs in ((0, v1), (1, v2)):
        inner = sorted(vs)
        idx = {v: i for i, v in enumerate(inner)}
        edges = [(idx[a], idx[b]) for a, b in g.induced_subgraph(vs).edges]
        labels = {}
        nxt = len(inner)
        for (a, b), x in zip(crossing, taxa):
            edges.append((idx[a if s == 0 else b], nxt))
            labels[nxt] = x
            nxt += 1
        names = {idx[v]: g.display_name(v) for v in inner if v in g.names}
        trees.append(PhyloTree(LabeledGraph(range(nxt), edges, labels, names)))
    t1, t2 = trees
    if not isomorphic(suppress(build_display_graph(t1, t2).graph), g):
        raise InvalidPartition("reconstructed trees do not round-trip")
    return t1, t2


def isomorphic(a: LabeledGraph, b: LabeledGraph) -> bool:
    """Unlabelled multigraph isomorphism."""
    if a.n != b.n or a.m != b.m:
        return False
    if sorted(a.degree(v) for v in a.vertices) != sorted(b.degree(v) for v in b.vertices):
        return False
    ga = nx.MultiGraph(list(a.edges))
    ga.add_nodes_from(a.vertices)
    gb = nx.MultiGraph(list(b.edges))
    gb.add_nodes_from(b.vertices)
    return nx.is_isomorphic(ga, gb)


@dataclass
class Verdict:
    status: str  # "yes", "no" or "unknown"
    trees: tuple[PhyloTree, PhyloTree] | None = None
    reason: str = ""
    warnings: list[str] = field(default_factory=list)

    @property
    def taxa(self) -> tuple[str, ...]:
        return self.trees[0].taxa if self.trees else ()

    def __bool__(self) -> bool:
        return self.status == "yes"


def is_display_graph(g: LabeledGraph, node_limit: int | None = 10_000_000) -> Verdict:
    """Is g the suppressed display graph of two trees on a common taxon set?"""
    warnings = []
    try:
        _require_cubic(g)
    except DisplayGraphError as exc:
        return Verdict("no", reason=f"{type(exc).__name__}: {exc}")
    from .core import biconnected_components

    if len(biconnected_components(g)) > 1:
        warnings.append("graph is not biconnected")
    try:
        part = tree_arboricity_two(g, node_limit)
    except LimitExceeded as exc:
        return Verdict("unknown", reason=str(exc), warnings=warnings)
    if part is None:
        return Verdict("no", reason="no split into two induced trees", warnings=warnings)
    return Verdict("yes", reconstruct_trees(g, part), warnings=warnings)
