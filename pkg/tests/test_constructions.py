import networkx as nx
import pytest

from displaygraph.constructions import (
    GridParams,
    embedding_deleted_raw_edges,
    grid_bramble,
    grid_embedding,
    grid_network,
    grid_path_decomposition,
    grid_suppressed_display_graph,
    grid_tree,
    raw_grid_network,
)
from displaygraph.core import level, reticulation_number
from displaygraph.errors import InvalidParams
from displaygraph.treewidth import validate_decomposition


@pytest.mark.parametrize("p", [(3, 10), (2, 6), (0, 9), (4, 10)])
def test_invalid_params(p):
    with pytest.raises(InvalidParams):
        GridParams(*p)


@pytest.mark.parametrize("p", [(2, 7), (4, 11)])
def test_network_shape(p):
    r, n = p
    net = grid_network(p)
    assert len(net.taxa) == r * n
    assert all(net.graph.degree(v) in (1, 3) for v in net.graph.vertices)
    assert level(net) == reticulation_number(net)
    assert len(grid_tree(p).taxa) == r * n


def test_raw_adjacency_spot_checks():
    raw = raw_grid_network((4, 11))
    for i in range(1, 4):
        assert raw.has_edge(raw.vertex_of_name(f"v{i}_0"), raw.vertex_of_name(f"u{i + 1}_0"))
    assert raw.has_edge(raw.vertex_of_name("y1_3"), raw.vertex_of_name("x1_3"))


@pytest.mark.parametrize("p", [(2, 7), (4, 11)])
def test_path_decomposition(p):
    r, _ = p
    td = grid_path_decomposition(p)
    assert validate_decomposition(grid_network(p).graph, td).valid
    assert td.width == r
    sizes = [len(b) for b in td.bags]
    assert sizes.count(r + 1) > 0 and max(sizes) == r + 1


def test_embedding_shape():
    p = (4, 11)
    cert = grid_embedding(p)
    net = grid_network(p)
    used = cert.image_vertices()
    assert len(cert.image_edges) == len(used) - 1
    # deleted raw edges: (r-1)(n-1) interior verticals plus one end per row gap
    assert len(embedding_deleted_raw_edges(p)) == 3 * 10 + 3
    assert set(net.taxa) <= {net.graph.labels[v] for v in used if v in net.graph.labels}


def test_bramble_sizes_and_rows():
    for p, size in [((2, 7), 20), ((4, 11), 72)]:
        assert len(grid_bramble(p)) == size
    # the z-rows of T are pairwise disjoint and miss the End element
    b = grid_bramble((4, 11))
    end = b.elements[-2]
    zrows = {frozenset(x for x in el if x.startswith("z")) for el in b.elements if any(x.startswith("z") for x in el)}
    assert len(zrows) == 4
    rows = sorted(zrows, key=sorted)
    for i, a in enumerate(rows):
        assert not (a & end)
        for c in rows[i + 1:]:
            assert not (a & c)


def test_suppressed_display_graph_is_biconnected():
    d = grid_suppressed_display_graph((2, 7))
    g = nx.MultiGraph(list(d.edges))
    assert nx.is_connected(g) and nx.is_biconnected(nx.Graph(g))


def test_ladder_minor_at_r2():
    # The 2 x (n+1) grid has maximum degree 3, so containing it as a minor
    # is the same as containing a subdivision of it, which suppression
    # preserves. The model is built on the raw network without its leaves.
    r, n = 2, 7
    raw = raw_grid_network((r, n))
    gone = {raw.vertex_of_name("u1_0"), raw.vertex_of_name(f"v{r}_{n}")} | set(raw.labels)
    host = raw.induced_subgraph(set(raw.vertices) - gone)

    def branch(i, j):
        names = [f"u{i}_{j}", f"v{i}_{j}"] + ([f"y{i}_{j}"] if j >= 1 else [])
        return {raw.vertex_of_name(nm) for nm in names} - gone

    sets = {(i, j): branch(i, j) for i in range(1, r + 1) for j in range(0, n + 1)}
    seen = set()
    for s in sets.values():
        assert s and not (s & seen)
        seen |= s
        assert host.induced_subgraph(s).is_connected()
    ladder = nx.grid_2d_graph(r, n + 1)
    for (a, b), (c, d) in ladder.edges:
        sa, sb = sets[(a + 1, b)], sets[(c + 1, d)]
        assert any(host.has_edge(x, y) for x in sa for y in sb), ((a, b), (c, d))
