import random

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from conftest import complete, cycle, four_cycle_network
from displaygraph.bramble import Bramble
from displaygraph.constructions import grid_bramble, grid_embedding, grid_network, grid_tree
from displaygraph.core import level
from displaygraph.display import labeled_tree_isomorphic
from displaygraph.errors import (
    DegreeViolation,
    Disconnected,
    DisplayGraphError,
    DuplicateTaxon,
    FormatIndexError,
    NewickSyntaxError,
    ParseError,
)
from displaygraph.formats import (
    parse_network_edgelist,
    parse_newick,
    read_bramble,
    read_certificate,
    read_gr,
    read_graph,
    read_td,
    write_bramble,
    write_certificate,
    write_gr,
    write_network_edgelist,
    write_newick,
    write_td,
)
from displaygraph.generators import random_network, random_tree
from displaygraph.recognition import isomorphic
from displaygraph.treewidth import exact_treewidth, validate_decomposition


def test_newick_examples():
    t = parse_newick("((a,b),(c,d));")
    assert t.taxa == ("a", "b", "c", "d") and t.graph.n == 6
    two = parse_newick("(a,b);")
    assert two.graph.n == 2 and two.graph.m == 1
    with pytest.raises(DuplicateTaxon):
        parse_newick("((a,a),(c,d));")
    with pytest.raises(DegreeViolation):
        parse_newick("((a,b,c),d,e);")


def test_newick_extras():
    t = parse_newick("(('a b':1.5,b[note]),(c:2,d)) ;")
    assert "a b" in t.taxa
    assert labeled_tree_isomorphic(parse_newick(write_newick(t)), t)
    with pytest.raises(NewickSyntaxError) as info:
        parse_newick("((a,b),(c,d)")
    assert info.value.offset is not None


def test_edgelist_examples():
    n = parse_network_edgelist(write_network_edgelist(four_cycle_network()))
    assert level(n) == 1
    deg4 = "#taxa\nl1 a\nl2 b\nl3 c\nl4 d\n#edges\nc l1\nc l2\nc l3\nc l4\n"
    with pytest.raises(DegreeViolation):
        parse_network_edgelist(deg4)
    disc = "#taxa\nl1 a\nl2 b\nl3 c\nl4 d\n#edges\nl1 l2\nl3 l4\n"
    with pytest.raises(Disconnected):
        parse_network_edgelist(disc)
    with pytest.raises(ParseError) as info:
        parse_network_edgelist("#taxa\nl1 a\n#edges\nl1\n")
    assert "line 4" in str(info.value)


def test_pace_examples():
    text = write_gr(complete(4))
    lines = text.splitlines()
    assert lines[0] == "p tw 4 6" and len(lines) == 7
    c4 = cycle(4)
    td = read_td("s td 2 3 4\nb 1 1 2 3\nb 2 1 3 4\n1 2\n", c4)
    rep = validate_decomposition(c4, td)
    assert rep.valid and rep.width == 2
    with pytest.raises(IndexError):
        read_td("s td 1 1 4\nb 1 0\n", c4)
    with pytest.raises(FormatIndexError):
        read_gr("p tw 2 1\n1 3\n")
    with pytest.raises(ParseError):
        read_gr("p xx 2 1\n1 2\n")


def test_certificate_and_bramble_round_trip():
    p = (2, 7)
    n, t, cert = grid_network(p), grid_tree(p), grid_embedding(p)
    assert read_certificate(write_certificate(cert, n, t), n, t) == cert
    b = grid_bramble(p)
    assert read_bramble(write_bramble(b)) == b


def test_read_graph_sniffs():
    assert read_graph(write_gr(complete(4))).m == 6
    assert read_graph(write_network_edgelist(four_cycle_network())).n == 8


@settings(max_examples=80, deadline=None)
@given(st.integers(2, 25), st.integers(0, 10**6))
def test_newick_round_trip(k, seed):
    t = random_tree(k, seed)
    text = write_newick(t)
    back = parse_newick(text)
    assert labeled_tree_isomorphic(back, t) if k >= 3 else back.graph.m == t.graph.m
    assert write_newick(back) == text


@settings(max_examples=60, deadline=None)
@given(st.integers(3, 9), st.integers(0, 4), st.integers(0, 10**6))
def test_edgelist_round_trip(k, r, seed):
    n = random_network(k, r, seed)
    back = parse_network_edgelist(write_network_edgelist(n))
    assert back.taxa == n.taxa
    assert isomorphic(back.graph, n.graph)
    assert write_network_edgelist(back) == write_network_edgelist(n)


@settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(st.integers(1, 14), st.floats(0.1, 0.8), st.integers(0, 10**6))
def test_gr_and_td_round_trip(n, p, seed):
    rng = random.Random(seed)
    from displaygraph.core import LabeledGraph

    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
    g = LabeledGraph(range(n), edges)
    back = read_gr(write_gr(g))
    assert isomorphic(back, g) and write_gr(back) == write_gr(g)
    _, td = exact_treewidth(g)
    td2 = read_td(write_td(td, g), g)
    assert write_td(td2, g) == write_td(td, g)
    assert validate_decomposition(g, td2).valid


@settings(max_examples=300, deadline=None)
@given(st.binary(max_size=64))
def test_parsers_never_crash(data):
    for fn in (parse_newick, read_gr, read_td, parse_network_edgelist, read_graph):
        try:
            fn(data if fn is parse_newick else data.decode("latin-1"))
        except DisplayGraphError:
            pass


@settings(max_examples=300, deadline=None)
@given(st.text(alphabet="(),;:ab'[]_ 0.9", max_size=40))
def test_newick_grammar_fuzz(text):
    try:
        parse_newick(text)
    except DisplayGraphError:
        pass
