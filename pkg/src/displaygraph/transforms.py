"""Constructive upper bounds on tw(D(N, T)) for a network N displaying T.

Each transform returns an explicit decomposition of D(N, T), and every
result is validated against the actual display graph before it is
returned, so the width bounds are checked rather than assumed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import (
    LabeledGraph,
    PhyloNetwork,
    PhyloTree,
    as_network,
    biconnected_components,
    build_display_graph,
    level,
    reticulation_number,
)
from .display import EmbeddingCertificate, verify_embedding
from .errors import InvalidCertificate, InvalidDecomposition, PreconditionError
from .treewidth import TreeDecomposition, exact_treewidth, validate_decomposition


def _check_inputs(n, t, cert) -> PhyloNetwork:
    n = as_network(n)
    if len(t.taxa) < 3:
        raise PreconditionError("the display-graph bounds need |X| >= 3")
    rep = verify_embedding(n, t, cert)
    if not rep.valid:
        raise InvalidCertificate("; ".join(str(v) for v in rep.violations[:5]))
    return n


def _certify(g: LabeledGraph, td: TreeDecomposition, bound: int, what: str) -> TreeDecomposition:
    rep = validate_decomposition(g, td)
    if not rep.valid:
        raise InvalidDecomposition(f"{what}: " + "; ".join(str(v) for v in rep.violations[:5]))
    if td.width > bound:
        raise InvalidDecomposition(f"{what}: width {td.width} exceeds the bound {bound}")
    return td


def lemma2_transform(n, t: PhyloTree, cert: EmbeddingCertificate, td_n: TreeDecomposition) -> TreeDecomposition:
    """Width <= 2w + 1 decomposition of D(N, T) from a width-w one of N:
    every bag holding an image vertex u also receives f(u)."""
    n = _check_inputs(n, t, cert)
    rep = validate_decomposition(n.graph, td_n)
    if not rep.valid:
        raise InvalidDecomposition("; ".join(str(v) for v in rep.violations[:5]))
    d = build_display_graph(n, t)
    f = cert.vertex_map
    bags = []
    for bag in td_n.bags:
        out = {d.first_map[u] for u in bag}
        out |= {d.second_map[f[u]] for u in bag if u in f}
        bags.append(out)
    td = TreeDecomposition(bags, td_n.tree)
    return _certify(d.graph, td, 2 * td_n.width + 1, "lemma2_transform")


def _branch_points(n: PhyloNetwork, t: PhyloTree, cert: EmbeddingCertificate) -> dict[int, int]:
    """Image a' in N of every vertex a of T."""
    img = n.graph.edge_subgraph(cert.image_edges)
    out = {}
    for a in t.graph.vertices:
        if a in t.graph.labels:
            out[a] = n.graph.vertex_of_label(t.graph.labels[a])
            continue
        fibre = [v for v, w in cert.vertex_map.items() if w == a and img.degree(v) == 3]
        if len(fibre) != 1:
            raise InvalidCertificate(f"tree vertex {a} has no unique branch point in the image")
        out[a] = fibre[0]
    return out


def spanning_extension(g: LabeledGraph, edges) -> list[tuple[int, int]]:
    """Extend an acyclic edge set to a spanning tree, trying the remaining
    edges in ascending (u, v) order."""
    parent = {v: v for v in g.vertices}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    out = []
    for u, v in edges:
        parent[find(u)] = find(v)
        out.append((u, v))
    chosen = set(out)
    for u, v in sorted(set(g.edges) - chosen):
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            out.append((u, v))
    return out


def greedy_vertex_cover(edges) -> list[int]:
    """Repeatedly take the vertex covering most uncovered edges (ties: lowest
    id). The result covers every edge with at most one vertex per edge."""
    left = list(edges)
    out = []
    while left:
        count: dict[int, int] = {}
        for u, v in left:
            count[u] = count.get(u, 0) + 1
            count[v] = count.get(v, 0) + 1
        best = min(count, key=lambda x: (-count[x], x))
        out.append(best)
        left = [e for e in left if best not in e]
    return out


def lemma3_transform(n, t: PhyloTree, cert: EmbeddingCertificate) -> TreeDecomposition:
    """Width <= level(N) + 2 decomposition of D(N, T).

    Starts from a width-2 decomposition of D(T', T) shaped like the spanning
    tree T' (one bag per vertex, a chain per edge), then adds a vertex cover
    of each block's non-tree edges to all bags of that block.
    """
    n = _check_inputs(n, t, cert)
    d = build_display_graph(n, t)
    g, gt = n.graph, t.graph
    image = _branch_points(n, t, cert)
    tree_edges = spanning_extension(g, cert.image_edges)
    img = g.edge_subgraph(cert.image_edges)

    # bags carry D ids; vertex bags and edge chains are indexed by N ids
    N = lambda v: d.first_map[v]  # noqa: E731
    T = lambda v: d.second_map[v]  # noqa: E731
    vbag = {v: {N(v)} for v in g.vertices}
    chain: dict[tuple[int, int], list[set]] = {e: [{N(e[0]), N(e[1])}] for e in tree_edges}
    for a in gt.vertices:
        vbag[image[a]].add(T(a))

    def set_chain(u, v, bags):
        """Chain oriented u -> v; stored under the sorted key."""
        if (u, v) in chain:
            chain[(u, v)] = bags
        else:
            chain[(v, u)] = bags[::-1]

    for a, b in gt.edges:
        pa, pb = image[a], image[b]
        path = _image_path(img, pa, pb)
        inner = path[1:-1]
        if not inner:
            set_chain(pa, pb, [{T(a), N(pa), T(b)}, {N(pa), N(pb), T(b)}])
            continue
        v1 = inner[0]
        set_chain(pa, v1, [{N(pa), N(v1), T(a)}])
        vbag[v1] |= {T(a), T(b)}
        for x in inner[1:]:
            vbag[x].add(T(b))
        for x, y in zip(inner, path[2:]):
            set_chain(x, y, [{N(x), N(y), T(b)}])

    in_tree = set(tree_edges)
    for comp in biconnected_components(g):
        vs = {x for e in comp for x in e}
        if len(vs) <= 2:
            continue
        missing = [e for e in comp if e not in in_tree]
        cover = {N(x) for x in greedy_vertex_cover(missing)}
        for x in vs:
            vbag[x] |= cover
        for e in tree_edges:
            if e[0] in vs and e[1] in vs:
                for bag in chain[e]:
                    bag |= cover

    bags: list[set] = []
    index = {}
    for v in g.vertices:
        index[v] = len(bags)
        bags.append(vbag[v])
    links = []
    for u, v in tree_edges:
        prev = index[u]
        for bag in chain[(u, v)]:
            bags.append(bag)
            links.append((prev, len(bags) - 1))
            prev = len(bags) - 1
        links.append((prev, index[v]))
    td = TreeDecomposition(bags, links)
    return _certify(d.graph, td, level(n) + 2, "lemma3_transform")


def _image_path(img: LabeledGraph, s: int, t: int) -> list[int]:
    from .display import _tree_path

    path = _tree_path(img, s, t)
    if path is None:
        raise InvalidCertificate(f"no image path between {s} and {t}")
    return path


@dataclass(frozen=True)
class BoundBundle:
    two_tw_plus_1: int
    retic_plus_2: int
    level_plus_2: int
    lemma2_width: int | None = None
    lemma3_width: int | None = None
    lemma2_td: TreeDecomposition | None = field(default=None, repr=False, compare=False)
    lemma3_td: TreeDecomposition | None = field(default=None, repr=False, compare=False)

    @property
    def min(self) -> int:
        return min(self.two_tw_plus_1, self.retic_plus_2, self.level_plus_2)

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.two_tw_plus_1, self.retic_plus_2, self.level_plus_2)


def bound_bundle(
    n,
    t: PhyloTree,
    cert: EmbeddingCertificate,
    tw_n: int | None = None,
    td_n: TreeDecomposition | None = None,
) -> BoundBundle:
    """min{2 tw(N) + 1, r(N) + 2, level(N) + 2}, each backed by a validated
    decomposition: the width-tw_n one of N pushed through lemma2_transform,
    and lemma3_transform (level <= r, so it certifies both remaining
    bounds). Without ``td_n`` the decomposition of N is computed exactly."""
    n = as_network(n)
    if td_n is None:
        _, td_n = exact_treewidth(n.graph)
    if tw_n is None:
        tw_n = td_n.width
    if td_n.width > tw_n:
        raise PreconditionError(f"decomposition of N has width {td_n.width} > tw_n = {tw_n}")
    td2 = lemma2_transform(n, t, cert, td_n)
    td3 = lemma3_transform(n, t, cert)
    return BoundBundle(
        2 * tw_n + 1,
        reticulation_number(n) + 2,
        level(n) + 2,
        td2.width,
        td3.width,
        td2,
        td3,
    )
