"""Graph substrate: labeled multigraphs, phylogenetic trees and networks,
display graphs, degree-2 suppression and the network parameters r(N), l(N).
"""

from __future__ import annotations

import heapq
from collections import Counter
from types import MappingProxyType
from typing import Iterable, Mapping

from .errors import (
    DegreeViolation,
    Disconnected,
    DuplicateTaxon,
    NotATree,
    NotSimple,
    TaxonMismatch,
)

Edge = tuple[int, int]


class LabeledGraph:
    """Undirected multigraph on integer vertex ids.

    ``labels`` maps some vertices to taxon names (unique). ``names`` is an
    optional, independent map from vertices to human-readable identifiers
    used by the grid generators; it survives suppression while labels may not.
    Instances are treated as immutable.
    """

    __slots__ = ("vertices", "edges", "labels", "names", "_adj", "_by_label", "_by_name")

    def __init__(
        self,
        vertices: Iterable[int],
        edges: Iterable[Edge],
        labels: Mapping[int, str] | None = None,
        names: Mapping[int, str] | None = None,
    ):
        verts = tuple(sorted(set(vertices)))
        adj: dict[int, list[int]] = {v: [] for v in verts}
        norm = []
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if u not in adj or v not in adj:
                raise ValueError(f"edge ({u}, {v}) references an unknown vertex")
            norm.append((u, v) if u < v else (v, u))
            adj[u].append(v)
            adj[v].append(u)
        labels = dict(labels or {})
        by_label = {}
        for v, lab in labels.items():
            if v not in adj:
                raise ValueError(f"label on unknown vertex {v}")
            if lab in by_label:
                raise DuplicateTaxon(f"taxon {lab!r} labels more than one vertex")
            by_label[lab] = v
        names = dict(names or {})
        by_name = {}
        for v, nm in names.items():
            if v not in adj:
                raise ValueError(f"name on unknown vertex {v}")
            if nm in by_name:
                raise ValueError(f"vertex name {nm!r} is not unique")
            by_name[nm] = v
        self.vertices = verts
        self.edges = tuple(norm)
        self.labels = MappingProxyType(labels)
        self.names = MappingProxyType(names)
        self._adj = {v: tuple(sorted(ns)) for v, ns in adj.items()}
        self._by_label = by_label
        self._by_name = by_name

    # -- basic queries -------------------------------------------------
    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def m(self) -> int:
        return len(self.edges)

    def __contains__(self, v) -> bool:
        return v in self._adj

    def neighbors(self, v: int) -> tuple[int, ...]:
        """Neighbors of ``v`` with multiplicity, ascending."""
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    @property
    def adjacency(self) -> Mapping[int, tuple[int, ...]]:
        return MappingProxyType(self._adj)

    def simple_adjacency(self) -> dict[int, set[int]]:
        return {v: set(ns) for v, ns in self._adj.items()}

    def edge_counts(self) -> Counter:
        return Counter(self.edges)

    def is_simple(self) -> bool:
        return len(set(self.edges)) == len(self.edges)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._adj.get(u, ())

    def components(self) -> list[list[int]]:
        seen = set()
        comps = []
        for s in self.vertices:
            if s in seen:
                continue
            comp = [s]
            seen.add(s)
            stack = [s]
            while stack:
                x = stack.pop()
                for y in self._adj[x]:
                    if y not in seen:
                        seen.add(y)
                        comp.append(y)
                        stack.append(y)
            comps.append(sorted(comp))
        return comps

    def is_connected(self) -> bool:
        return self.n <= 1 or len(self.components()) == 1

    def is_tree(self) -> bool:
        return self.n >= 1 and self.m == self.n - 1 and self.is_connected()

    # -- labels and names ----------------------------------------------
    @property
    def taxa(self) -> tuple[str, ...]:
        return tuple(sorted(self.labels.values()))

    def vertex_of_label(self, label: str) -> int:
        return self._by_label[label]

    def vertex_of_name(self, name: str) -> int:
        return self._by_name[name]

    def has_name(self, name: str) -> bool:
        return name in self._by_name

    def display_name(self, v: int) -> str:
        if v in self.labels:
            return self.labels[v]
        return self.names.get(v, str(v))

    # -- derived graphs ------------------------------------------------
    def induced_subgraph(self, vertices: Iterable[int]) -> "LabeledGraph":
        keep = set(vertices)
        return LabeledGraph(
            keep,
            [e for e in self.edges if e[0] in keep and e[1] in keep],
            {v: l for v, l in self.labels.items() if v in keep},
            {v: nm for v, nm in self.names.items() if v in keep},
        )

    def edge_subgraph(self, edges: Iterable[Edge]) -> "LabeledGraph":
        """Subgraph formed by ``edges`` and their endpoints (a multiset)."""
        es = [tuple(sorted(e)) for e in edges]
        vs = {x for e in es for x in e}
        return LabeledGraph(
            vs,
            es,
            {v: l for v, l in self.labels.items() if v in vs},
            {v: nm for v, nm in self.names.items() if v in vs},
        )

    def without_edges(self, edges: Iterable[Edge]) -> "LabeledGraph":
        """Remove one copy of each listed edge; vertices are kept."""
        drop = Counter(tuple(sorted(e)) for e in edges)
        kept = []
        for e in self.edges:
            if drop[e]:
                drop[e] -= 1
            else:
                kept.append(e)
        if +drop:
            raise ValueError(f"edges not in graph: {sorted(+drop)}")
        return LabeledGraph(self.vertices, kept, self.labels, self.names)

    def with_labels(self, labels: Mapping[int, str] | None) -> "LabeledGraph":
        return LabeledGraph(self.vertices, self.edges, labels, self.names)

    def simple(self) -> "LabeledGraph":
        """Collapse parallel edges."""
        return LabeledGraph(self.vertices, dict.fromkeys(self.edges), self.labels, self.names)

    def relabel_dense(self) -> tuple["LabeledGraph", dict[int, int]]:
        """Copy with vertex ids renumbered 0..n-1 in ascending order."""
        idx = {v: i for i, v in enumerate(self.vertices)}
        g = LabeledGraph(
            range(self.n),
            [(idx[u], idx[v]) for u, v in self.edges],
            {idx[v]: l for v, l in self.labels.items()},
            {idx[v]: nm for v, nm in self.names.items()},
        )
        return g, idx

    def to_networkx(self):
        import networkx as nx

        g = nx.MultiGraph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from(self.edges)
        return g

    def __eq__(self, other) -> bool:
        if not isinstance(other, LabeledGraph):
            return NotImplemented
        return (
            self.vertices == other.vertices
            and Counter(self.edges) == Counter(other.edges)
            and dict(self.labels) == dict(other.labels)
            and dict(self.names) == dict(other.names)
        )

    __hash__ = None

    def __repr__(self) -> str:
        return f"LabeledGraph(n={self.n}, m={self.m}, taxa={len(self.labels)})"


# ---------------------------------------------------------------------------
# phylogenetic structures


def tree_violations(g: LabeledGraph) -> list[Exception]:
    """Every reason ``g`` is not an unrooted binary phylogenetic tree."""
    problems: list[Exception] = []
    if g.n == 0:
        return [NotATree("empty graph")]
    if not g.is_connected():
        problems.append(Disconnected(f"{len(g.components())} connected components"))
    elif g.m != g.n - 1:
        problems.append(NotATree(f"{g.m} edges on {g.n} vertices"))
    problems.extend(_degree_violations(g))
    return problems


def network_violations(g: LabeledGraph) -> list[Exception]:
    """Every reason ``g`` is not an unrooted binary phylogenetic network."""
    problems: list[Exception] = []
    if g.n == 0:
        return [Disconnected("empty graph")]
    if not g.is_simple():
        dup = sorted(e for e, c in g.edge_counts().items() if c > 1)
        problems.append(NotSimple(f"parallel edges {dup}"))
    if not g.is_connected():
        problems.append(Disconnected(f"{len(g.components())} connected components"))
    problems.extend(_degree_violations(g))
    return problems


def _degree_violations(g: LabeledGraph) -> list[Exception]:
    out: list[Exception] = []
    single = g.n == 1 and len(g.labels) == 1
    for v in g.vertices:
        d = g.degree(v)
        if v in g.labels:
            if d != 1 and not single:
                out.append(DegreeViolation(f"taxon {g.labels[v]!r} has degree {d}"))
        elif d != 3:
            out.append(DegreeViolation(f"unlabeled vertex {g.display_name(v)} has degree {d}"))
    return out


class PhyloTree:
    """Unrooted binary phylogenetic tree; validated on construction."""

    __slots__ = ("graph", "taxa")

    def __init__(self, graph: LabeledGraph):
        problems = tree_violations(graph)
        if problems:
            raise problems[0]
        self.graph = graph
        self.taxa = graph.taxa

    def __repr__(self) -> str:
        return f"PhyloTree(|X|={len(self.taxa)}, n={self.graph.n})"


class PhyloNetwork:
    """Unrooted binary phylogenetic network; validated on construction."""

    __slots__ = ("graph", "taxa")

    def __init__(self, graph: LabeledGraph):
        problems = network_violations(graph)
        if problems:
            raise problems[0]
        self.graph = graph
        self.taxa = graph.taxa

    @classmethod
    def from_tree(cls, t: PhyloTree) -> "PhyloNetwork":
        return cls(t.graph)

    def __repr__(self) -> str:
        return f"PhyloNetwork(|X|={len(self.taxa)}, n={self.graph.n}, r={reticulation_number(self)})"


class DisplayGraph:
    """D(a, b): disjoint union of ``a`` and ``b`` with same-label leaves merged.

    ``first_map``/``second_map`` send vertex ids of ``a``/``b`` to ids in
    ``graph``; ``side`` tags each vertex ``first``, ``second`` or ``shared``.
    """

    __slots__ = ("graph", "taxa", "side", "first_map", "second_map")

    def __init__(self, graph, taxa, side, first_map, second_map):
        self.graph = graph
        self.taxa = tuple(taxa)
        self.side = MappingProxyType(dict(side))
        self.first_map = MappingProxyType(dict(first_map))
        self.second_map = MappingProxyType(dict(second_map))

    def __repr__(self) -> str:
        return f"DisplayGraph(|X|={len(self.taxa)}, n={self.graph.n}, m={self.graph.m})"


def build_display_graph(a, b) -> DisplayGraph:
    """Display graph of two trees or networks on the same taxa.

    Ids: vertices of ``a`` first (ascending), then non-taxon vertices of ``b``.
    """
    if set(a.taxa) != set(b.taxa):
        raise TaxonMismatch(
            f"taxon sets differ: only in first {sorted(set(a.taxa) - set(b.taxa))}, "
            f"only in second {sorted(set(b.taxa) - set(a.taxa))}"
        )
    if not a.taxa:
        raise TaxonMismatch("empty taxon set")
    ga, gb = a.graph, b.graph
    first_map = {v: i for i, v in enumerate(ga.vertices)}
    second_map = {}
    nxt = len(first_map)
    for v in gb.vertices:
        if v in gb.labels:
            second_map[v] = first_map[ga.vertex_of_label(gb.labels[v])]
        else:
            second_map[v] = nxt
            nxt += 1
    edges = [(first_map[u], first_map[v]) for u, v in ga.edges]
    edges += [(second_map[u], second_map[v]) for u, v in gb.edges]
    labels = {first_map[v]: lab for v, lab in ga.labels.items()}
    names = {first_map[v]: nm for v, nm in ga.names.items()}
    taken = set(names.values())
    for v, nm in gb.names.items():
        if v not in gb.labels and nm not in taken:
            names[second_map[v]] = nm
    side = {i: "first" for i in first_map.values()}
    for v, i in second_map.items():
        side[i] = "shared" if v in gb.labels else "second"
    g = LabeledGraph(range(nxt), edges, labels, names)
    return DisplayGraph(g, a.taxa, side, first_map, second_map)


# ---------------------------------------------------------------------------
# suppression


def suppress_with_chains(
    g: LabeledGraph, keep_labels: bool = False
) -> tuple[LabeledGraph, list[tuple[int, ...]]]:
    """Iteratively suppress degree-2 vertices.

    Returns the suppressed graph and, aligned with its ``edges``, the vertex
    path of ``g`` that each output edge replaced. Labeled vertices are
    suppressed too unless ``keep_labels``. A vertex whose two edges go to the
    same neighbour is left alone (suppressing it would create a self-loop).
    """
    # edge id -> [a, b, path]
    edges: dict[int, list] = {i: [u, v, (u, v)] for i, (u, v) in enumerate(g.edges)}
    inc: dict[int, list[int]] = {v: [] for v in g.vertices}
    for i, (u, v) in enumerate(g.edges):
        inc[u].append(i)
        inc[v].append(i)
    nxt = len(edges)

    def suppressible(v):
        if len(inc[v]) != 2 or (keep_labels and v in g.labels):
            return False
        e1, e2 = inc[v]
        a = edges[e1][0] if edges[e1][1] == v else edges[e1][1]
        b = edges[e2][0] if edges[e2][1] == v else edges[e2][1]
        return a != b

    heap = [v for v in g.vertices if suppressible(v)]
    heapq.heapify(heap)
    removed = set()
    while heap:
        v = heapq.heappop(heap)
        if v in removed or not suppressible(v):
            continue
        e1, e2 = inc[v]
        p1 = _path_ending_at(edges[e1], v)
        p2 = _path_ending_at(edges[e2], v)[::-1]
        a, b = p1[0], p2[-1]
        path = p1 + p2[1:]
        for e in (e1, e2):
            x, y, _ = edges.pop(e)
            other = x if y == v else y
            inc[other].remove(e)
        del inc[v]
        removed.add(v)
        edges[nxt] = [a, b, path]
        inc[a].append(nxt)
        inc[b].append(nxt)
        nxt += 1
        for w in (a, b):
            if suppressible(w):
                heapq.heappush(heap, w)
    order = sorted(edges)
    keep = [v for v in g.vertices if v not in removed]
    labels = {} if not keep_labels else {v: l for v, l in g.labels.items() if v not in removed}
    names = {v: nm for v, nm in g.names.items() if v not in removed}
    out = LabeledGraph(keep, [(edges[i][0], edges[i][1]) for i in order], labels, names)
    chains = []
    for i in order:
        a, b, path = edges[i]
        chains.append(path if a <= b else path[::-1])
    return out, chains


def _path_ending_at(rec, v):
    a, b, path = rec
    path = tuple(path)
    if path[-1] == v:
        return path
    return path[::-1]


def suppress(g: LabeledGraph) -> LabeledGraph:
    """Erase labels and suppress all degree-2 vertices (names are kept)."""
    return suppress_with_chains(g)[0]


# ---------------------------------------------------------------------------
# network parameters


def reticulation_number(net) -> int:
    """|E| - |V| + 1 of a connected tree or network."""
    g = getattr(net, "graph", net)
    return g.m - g.n + 1


def biconnected_components(g: LabeledGraph) -> list[tuple[Edge, ...]]:
    """Partition of the edges into biconnected components.

    Iterative Hopcroft-Tarjan over edge ids, so parallel edges land in the
    same component. Components come out in DFS completion order.
    """
    if not g.is_connected():
        raise Disconnected("biconnected components need a connected graph")
    return [tuple(g.edges[i] for i in comp) for comp in _bcc_edge_ids(g)]


def _bcc_edge_ids(g: LabeledGraph) -> list[list[int]]:
    inc: dict[int, list[tuple[int, int]]] = {v: [] for v in g.vertices}
    for i, (u, v) in enumerate(g.edges):
        inc[u].append((v, i))
        inc[v].append((u, i))
    disc: dict[int, int] = {}
    low: dict[int, int] = {}
    comps = []
    timer = 0
    for root in g.vertices:
        if root in disc:
            continue
        disc[root] = low[root] = timer
        timer += 1
        estack: list[int] = []
        # frame: vertex, parent edge id, iterator position
        stack = [(root, -1, 0)]
        while stack:
            v, pe, pos = stack[-1]
            if pos < len(inc[v]):
                stack[-1] = (v, pe, pos + 1)
                w, eid = inc[v][pos]
                if eid == pe:
                    continue
                if w not in disc:
                    disc[w] = low[w] = timer
                    timer += 1
                    estack.append(eid)
                    stack.append((w, eid, 0))
                elif disc[w] < disc[v]:
                    estack.append(eid)
                    low[v] = min(low[v], disc[w])
            else:
                stack.pop()
                if stack:
                    u = stack[-1][0]
                    low[u] = min(low[u], low[v])
                    if low[v] >= disc[u]:
                        comp = []
                        while True:
                            e = estack.pop()
                            comp.append(e)
                            if e == pe:
                                break
                        comps.append(sorted(comp))
    return comps


def block_vertex_sets(g: LabeledGraph) -> list[frozenset[int]]:
    return [frozenset(x for e in comp for x in e) for comp in biconnected_components(g)]


def level(net) -> int:
    """Largest cyclomatic number over the biconnected components."""
    g = getattr(net, "graph", net)
    best = 0
    for comp in biconnected_components(g):
        vs = {x for e in comp for x in e}
        best = max(best, len(comp) - len(vs) + 1)
    return best


def as_network(x) -> PhyloNetwork:
    if isinstance(x, PhyloNetwork):
        return x
    if isinstance(x, PhyloTree):
        return PhyloNetwork.from_tree(x)
    raise TypeError(f"expected PhyloTree or PhyloNetwork, got {type(x).__name__}")
