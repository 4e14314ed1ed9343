"""Generators for the grid family: a network N of treewidth r, a weaving
caterpillar T displayed by N, the explicit embedding, the explicit path
decomposition of N, and the bramble of order 2r+1 in D(N, T).

Vertices carry names ``x{i}_{j}``, ``y{i}_{j}``, ``u{i}_{j}``, ``v{i}_{j}``
(network) and ``z{i}_{j}`` (tree); taxa are labelled ``x{i}_{j}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .core import (
    DisplayGraph,
    LabeledGraph,
    PhyloNetwork,
    PhyloTree,
    build_display_graph,
    suppress_with_chains,
)
from .errors import InvalidParams


@dataclass(frozen=True)
class GridParams:
    r: int
    n: int

    def __post_init__(self):
        if not isinstance(self.r, int) or not isinstance(self.n, int):
            raise InvalidParams("r and n must be integers")
        if self.r < 2 or self.r % 2:
            raise InvalidParams(f"r must be a positive even integer, got {self.r}")
        if self.n <= 2 * self.r + 2:
            raise InvalidParams(f"need n > 2r + 2 = {2 * self.r + 2}, got {self.n}")


def _params(p) -> GridParams:
    if isinstance(p, GridParams):
        return p
    r, n = p
    return GridParams(r, n)


def taxon(i: int, j: int) -> str:
    return f"x{i}_{j}"


def _nm(kind: str, i: int, j: int) -> str:
    return f"{kind}{i}_{j}"


# ---------------------------------------------------------------------------
# network


@lru_cache(maxsize=16)
def _network_build(p: GridParams):
    r, n = p.r, p.n
    names: list[str] = []
    for i in range(1, r + 1):
        for j in range(1, n + 1):
            names.append(_nm("x", i, j))
    for i in range(1, r + 1):
        for j in range(1, n + 1):
            names.append(_nm("y", i, j))
    for kind in ("u", "v"):
        for i in range(1, r + 1):
            for j in range(0, n + 1):
                names.append(_nm(kind, i, j))
    idx = {nm: k for k, nm in enumerate(names)}
    edges: dict[tuple[int, int], None] = {}

    def add(a, b):
        e = (idx[a], idx[b])
        edges[tuple(sorted(e))] = None

    for i in range(1, r + 1):
        for j in range(1, n + 1):
            add(_nm("y", i, j), _nm("x", i, j))
            add(_nm("u", i, j - 1), _nm("v", i, j - 1))
            add(_nm("v", i, j - 1), _nm("y", i, j))
            add(_nm("y", i, j), _nm("u", i, j))
            add(_nm("u", i, j), _nm("v", i, j))
    for i in range(1, r):
        for j in range(0, n + 1):
            add(_nm("v", i, j), _nm("u", i + 1, j))
    labels = {idx[_nm("x", i, j)]: taxon(i, j) for i in range(1, r + 1) for j in range(1, n + 1)}
    raw = LabeledGraph(range(len(names)), edges, labels, dict(enumerate(names)))
    pendant = [v for v in raw.vertices if raw.degree(v) == 1 and v not in raw.labels]
    assert sorted(raw.names[v] for v in pendant) == sorted([_nm("u", 1, 0), _nm("v", r, n)])
    trimmed = raw.induced_subgraph(set(raw.vertices) - set(pendant))
    live, chains = suppress_with_chains(trimmed, keep_labels=True)
    dense, remap = live.relabel_dense()
    name_chains = [tuple(trimmed.names[x] for x in ch) for ch in chains]
    return raw, PhyloNetwork(dense), name_chains


def grid_network(p) -> PhyloNetwork:
    """The grid network N on r*n taxa (after deleting unlabelled leaves and
    suppressing degree-2 vertices)."""
    return _network_build(_params(p))[1]


def raw_grid_network(p) -> LabeledGraph:
    """N before the deletion/suppression clean-up, all paper names present."""
    return _network_build(_params(p))[0]


def grid_edge_chains(p) -> list[tuple[str, ...]]:
    """For each edge of ``grid_network(p).graph`` (same order), the names of
    the raw vertices on the path it replaced."""
    return _network_build(_params(p))[2]


# ---------------------------------------------------------------------------
# tree


@lru_cache(maxsize=16)
def _tree_build(p: GridParams) -> PhyloTree:
    r, n = p.r, p.n
    names = [_nm("x", i, j) for i in range(1, r + 1) for j in range(1, n + 1)]
    names += [_nm("z", i, j) for i in range(1, r + 1) for j in range(1, n + 1)]
    idx = {nm: k for k, nm in enumerate(names)}
    edges = []
    for i in range(1, r + 1):
        for j in range(1, n + 1):
            edges.append((idx[_nm("z", i, j)], idx[_nm("x", i, j)]))
        for j in range(1, n):
            edges.append((idx[_nm("z", i, j)], idx[_nm("z", i, j + 1)]))
    for i in range(1, r):
        if i % 2:
            edges.append((idx[_nm("z", i, n)], idx[_nm("z", i + 1, n)]))
        else:
            edges.append((idx[_nm("z", i, 1)], idx[_nm("z", i + 1, 1)]))
    labels = {idx[_nm("x", i, j)]: taxon(i, j) for i in range(1, r + 1) for j in range(1, n + 1)}
    raw = LabeledGraph(range(len(names)), edges, labels, dict(enumerate(names)))
    deg2 = sorted(raw.names[v] for v in raw.vertices if raw.degree(v) == 2)
    assert deg2 == sorted([_nm("z", 1, 1), _nm("z", r, 1)]), deg2
    live, _ = suppress_with_chains(raw, keep_labels=True)
    return PhyloTree(live.relabel_dense()[0])


def grid_tree(p) -> PhyloTree:
    """The caterpillar T weaving through the rows of the grid."""
    return _tree_build(_params(p))


# ---------------------------------------------------------------------------
# embedding


def embedding_deleted_raw_edges(p) -> set[frozenset[str]]:
    """Raw vertical edges whose removal leaves the image of T.

    Every vertical edge between columns 1..n-1, plus the column-0 vertical
    edge below each odd row and the column-n vertical edge below each even
    row, so consecutive rows stay linked alternately at the right and left
    ends as T weaves.
    """
    p = _params(p)
    r, n = p.r, p.n
    out = set()
    for i in range(1, r):
        for j in range(0, n + 1):
            if 1 <= j <= n - 1 or (j == 0 and i % 2 == 1) or (j == n and i % 2 == 0):
                out.add(frozenset((_nm("v", i, j), _nm("u", i + 1, j))))
    return out


def grid_embedding(p):
    """Certificate that N displays T: image edges plus the surjection f."""
    from .display import certificate_from_image

    p = _params(p)
    net = grid_network(p)
    tree = grid_tree(p)
    deleted = embedding_deleted_raw_edges(p)
    image = []
    for e, chain in zip(net.graph.edges, grid_edge_chains(p)):
        raw_edges = {frozenset(pair) for pair in zip(chain, chain[1:])}
        if not raw_edges & deleted:
            image.append(e)
    branch = {}
    for v, nm in tree.graph.names.items():
        if nm.startswith("z"):
            branch[v] = net.graph.vertex_of_name("y" + nm[1:])
    return certificate_from_image(net, tree, image, branch)


# ---------------------------------------------------------------------------
# path decomposition


def grid_path_steps(p) -> tuple[list[str], list[tuple[str, str]]]:
    """Initial bag and the (add, delete) steps of the explicit path
    decomposition of N without its leaves."""
    p = _params(p)
    r, n = p.r, p.n
    y = lambda i, j: _nm("y", i, j)  # noqa: E731
    u = lambda i, j: _nm("u", i, j)  # noqa: E731
    v = lambda i, j: _nm("v", i, j)  # noqa: E731
    initial = [y(1, 1)] + [v(i, 0) for i in range(2, r)] + [y(r, 1)]
    steps = [(v(1, 1), y(1, 1))]
    for i in range(2, r):
        steps += [(y(i, 1), v(i, 0)), (u(i, 1), y(i, 1)), (v(i, 1), u(i, 1))]
    steps.append((u(r, 1), y(r, 1)))
    for j in range(1, n - 1):
        steps += [(y(1, j + 1), v(1, j)), (v(1, j + 1), y(1, j + 1))]
        for i in range(2, r):
            steps += [(y(i, j + 1), v(i, j)), (u(i, j + 1), y(i, j + 1)), (v(i, j + 1), u(i, j + 1))]
        steps += [(y(r, j + 1), u(r, j)), (u(r, j + 1), y(r, j + 1))]
    steps.append((y(1, n), v(1, n - 1)))
    for i in range(2, r):
        steps += [(y(i, n), v(i, n - 1)), (u(i, n), y(i, n))]
    steps.append((y(r, n), u(r, n - 1)))
    return initial, steps


def grid_path_decomposition(p):
    """Replay the (add, delete) steps into a decomposition of N of width r.

    Bags alternate between the r+1-vertex bag after an addition and the
    r-vertex bag after the matching deletion; each leaf x gets a bag {x, y}
    hung off the first bag holding its y.
    """
    from .treewidth import TreeDecomposition

    p = _params(p)
    g = grid_network(p).graph
    initial, steps = grid_path_steps(p)
    current = [g.vertex_of_name(nm) for nm in initial]
    bags = [frozenset(current)]
    for add, delete in steps:
        a, d = g.vertex_of_name(add), g.vertex_of_name(delete)
        bags.append(bags[-1] | {a})
        bags.append(bags[-1] - {d})
    tree = [(k, k + 1) for k in range(len(bags) - 1)]
    first = {}
    for k, bag in enumerate(bags):
        for x in bag:
            first.setdefault(x, k)
    for i in range(1, p.r + 1):
        for j in range(1, p.n + 1):
            leaf = g.vertex_of_label(taxon(i, j))
            yv = g.vertex_of_name(_nm("y", i, j))
            bags.append(frozenset((leaf, yv)))
            tree.append((first[yv], len(bags) - 1))
    return TreeDecomposition(bags, tree)


# ---------------------------------------------------------------------------
# display graph and bramble


def grid_display_graph(p) -> DisplayGraph:
    p = _params(p)
    return build_display_graph(grid_network(p), grid_tree(p))


def grid_suppressed_display_graph(p) -> LabeledGraph:
    """D(N, T) with the taxon vertices suppressed (names kept)."""
    return suppress_with_chains(grid_display_graph(p).graph)[0]


def grid_bramble(p):
    """The S, T, End and Top sets, as name sets over D(N, T). Names of
    vertices removed during construction are kept; they are dropped when
    the bramble is resolved against a graph."""
    from .bramble import Bramble

    p = _params(p)
    r, n = p.r, p.n

    def column(j):
        return {_nm(k, h, j) for h in range(1, r + 1) for k in "yuv"}

    elements = []
    for i in range(1, r):
        row = {_nm(k, i, l) for l in range(0, n) for k in "uvy"}
        for j in range(1, n):
            elements.append(frozenset(row | column(j)))
    for i in range(1, r + 1):
        zrow = {_nm("z", i, l) for l in range(1, n + 1)}
        for j in range(1, n):
            elements.append(frozenset(zrow | column(j)))
    elements.append(frozenset({_nm(k, h, n) for h in range(1, r + 1) for k in "yu"}))
    elements.append(frozenset({_nm(k, r, l) for l in range(1, n) for k in "yu"}))
    return Bramble(elements)


def grid_hitting_set_names(p) -> frozenset[str]:
    """The explicit hitting set of size 2r+1."""
    p = _params(p)
    out = {_nm("y", i, 2) for i in range(1, p.r + 1)} | {_nm("z", i, 2) for i in range(1, p.r + 1)}
    out.add(_nm("y", 1, p.n))
    return frozenset(out)
