"""Readers and writers: Newick trees, edge-list networks, PACE .gr/.td,
embedding certificates and brambles.

Every reader raises a subclass of ``DisplayGraphError`` on bad input and
nothing else, so arbitrary bytes can be fed to them safely.
"""

from __future__ import annotations

import enum
import math
import re

from .bramble import Bramble
from .core import LabeledGraph, PhyloNetwork, PhyloTree, network_violations
from .display import EmbeddingCertificate
from .errors import DisplayGraphError, FormatIndexError, NewickSyntaxError, ParseError
from .treewidth import TreeDecomposition


class FileFormat(enum.Enum):
    NEWICK = "newick"
    EDGELIST = "edgelist"
    PACE_GR = "gr"
    PACE_TD = "td"


# ---------------------------------------------------------------------------
# Newick

_PUNCT = set(b"(),:;[]'")
_WS = set(b" \t\r\n")


def _parse_length(data: bytes, i: int) -> int:
    start = i
    while i < len(data) and data[i] not in _PUNCT and data[i] not in _WS:
        i += 1
    token = data[start:i].decode("ascii", "replace")
    try:
        value = float(token)
    except ValueError:
        raise NewickSyntaxError(f"bad branch length {token!r}", start) from None
    if math.isnan(value):
        raise NewickSyntaxError("branch length is NaN", start)
    return i


def _skip_ws(data: bytes, i: int) -> int:
    while i < len(data):
        c = data[i]
        if c in _WS:
            i += 1
        elif c == ord("["):
            end = data.find(b"]", i + 1)
            if end < 0:
                raise NewickSyntaxError("unterminated comment", i)
            i = end + 1
        else:
            break
    return i


def _read_label(data: bytes, i: int) -> tuple[str, int]:
    if i < len(data) and data[i] == ord("'"):
        out = bytearray()
        j = i + 1
        while True:
            if j >= len(data):
                raise NewickSyntaxError("unterminated quoted label", i)
            if data[j] == ord("'"):
                if j + 1 < len(data) and data[j + 1] == ord("'"):
                    out.append(ord("'"))
                    j += 2
                    continue
                j += 1
                break
            out.append(data[j])
            j += 1
        return _decode(bytes(out), i), j
    j = i
    while j < len(data) and data[j] not in _PUNCT and data[j] not in _WS:
        j += 1
    return _decode(data[i:j], i), j


def _decode(raw: bytes, offset: int) -> str:
    try:
        return raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise NewickSyntaxError("label is not valid UTF-8", offset + exc.start) from None


def parse_newick(text) -> PhyloTree:
    """Parse one Newick tree. Branch lengths, internal labels and comments
    are discarded; a degree-2 root is suppressed. Syntax errors carry the
    byte offset of the problem."""
    data = text.encode("utf-8") if isinstance(text, str) else bytes(text)
    children: list[list[int]] = []
    labels: dict[int, str] = {}
    offsets: list[int] = []

    def new(at):
        children.append([])
        offsets.append(at)
        return len(children) - 1

    i = _skip_ws(data, 0)
    if i >= len(data):
        raise NewickSyntaxError("empty input", i)
    stack: list[int] = []
    root = None
    expect_node = True
    current = None
    while True:
        i = _skip_ws(data, i)
        if i >= len(data):
            raise NewickSyntaxError("missing ';'", i)
        c = data[i]
        if expect_node:
            if c == ord("("):
                node = new(i)
                if stack:
                    children[stack[-1]].append(node)
                stack.append(node)
                i += 1
                continue
            node = new(i)
            label, i = _read_label(data, i)
            if not label:
                raise NewickSyntaxError("leaf without a label", i)
            labels[node] = label
            if stack:
                children[stack[-1]].append(node)
            current = node
            expect_node = False
            continue
        # after a node: optional label / length, then , ) or ;
        if c not in (ord(","), ord(")"), ord(";"), ord(":")):
            start = i
            label, i = _read_label(data, i)
            if not label or current is None or current in labels:
                raise NewickSyntaxError(f"unexpected character {chr(c)!r}", start)
            continue  # internal label, ignored
        if c == ord(":"):
            i = _skip_ws(data, i + 1)
            i = _parse_length(data, i)
            continue
        if c == ord(","):
            if not stack:
                raise NewickSyntaxError("',' outside parentheses", i)
            expect_node = True
            current = None
            i += 1
            continue
        if c == ord(")"):
            if not stack:
                raise NewickSyntaxError("unbalanced ')'", i)
            current = stack.pop()
            i += 1
            continue
        # ';'
        if stack:
            raise NewickSyntaxError("unbalanced '(' before ';'", i)
        root = current
        i = _skip_ws(data, i + 1)
        if i != len(data):
            raise NewickSyntaxError("trailing characters after ';'", i)
        break
    return _tree_from_rooted(children, labels, root, offsets)


def _tree_from_rooted(children, labels, root, offsets) -> PhyloTree:
    edges = []
    for v, cs in enumerate(children):
        if v not in labels and len(cs) == 0:
            raise NewickSyntaxError("empty parentheses", offsets[v])
        if v in labels and cs:
            raise NewickSyntaxError("labelled node with children", offsets[v])
        for c in cs:
            edges.append((v, c))
    verts = list(range(len(children)))
    if len(children[root]) == 2 and len(labels) > 2:
        a, b = children[root]
        edges = [e for e in edges if root not in e] + [(a, b)]
        verts.remove(root)
    elif len(children[root]) == 1 and root not in labels:
        (a,) = children[root]
        edges = [e for e in edges if root not in e]
        verts.remove(root)
    elif len(children[root]) == 2 and len(labels) == 2 and all(c in labels for c in children[root]):
        a, b = children[root]
        edges = [(a, b)]
        verts = [a, b]
    g = LabeledGraph(verts, edges, labels)
    dense, _ = g.relabel_dense()
    return PhyloTree(dense)


_SAFE = re.compile(r"^[^\s()\[\]',:;]+$")


def _quote(label: str) -> str:
    if _SAFE.match(label):
        return label
    return "'" + label.replace("'", "''") + "'"


def write_newick(t: PhyloTree) -> str:
    """Deterministic Newick: rooted at the neighbour of the smallest taxon,
    children in sorted order of their encodings."""
    g = t.graph
    if len(t.taxa) == 1:
        return _quote(t.taxa[0]) + ";"
    if len(t.taxa) == 2:
        return "(" + ",".join(_quote(x) for x in t.taxa) + ");"
    start = g.vertex_of_label(t.taxa[0])
    (root,) = g.neighbors(start)
    parent = {root: None}
    order = [root]
    for x in order:
        for y in g.neighbors(x):
            if y not in parent:
                parent[y] = x
                order.append(y)
    enc: dict[int, str] = {}
    for v in reversed(order):
        if v in g.labels:
            enc[v] = _quote(g.labels[v])
        else:
            parts = sorted(enc[w] for w in g.neighbors(v) if parent.get(w) == v)
            enc[v] = "(" + ",".join(parts) + ")"
    return enc[root] + ";"


# ---------------------------------------------------------------------------
# network edge lists


def parse_network_edgelist(text: str) -> PhyloNetwork:
    """Edge-list network.

    ::

        #taxa
        <vertex> <taxon>
        ...
        #edges
        <vertex> <vertex>
        ...

    Blank lines and other lines starting with ``#`` are ignored. Vertex ids
    follow first appearance. Structural problems raise the first violation;
    all of them are attached as ``violations``.
    """
    g = _parse_edgelist_graph(text)
    problems = network_violations(g)
    if problems:
        exc = problems[0]
        exc.violations = problems
        raise exc
    return PhyloNetwork(g)


def _parse_edgelist_graph(text) -> LabeledGraph:
    if isinstance(text, (bytes, bytearray)):
        try:
            text = bytes(text).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError("input is not valid UTF-8", 1) from None
    section = None
    ids: dict[str, int] = {}
    labels: dict[int, str] = {}
    edges: list[tuple[int, int]] = []
    seen_taxa = False

    def vid(name):
        if name not in ids:
            ids[name] = len(ids)
        return ids[name]

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            head = line.split()[0].lower()
            if head == "#taxa":
                if section is not None:
                    raise ParseError("'#taxa' must come first and only once", lineno)
                section = "taxa"
                seen_taxa = True
            elif head == "#edges":
                if section != "taxa":
                    raise ParseError("'#edges' before '#taxa'", lineno)
                section = "edges"
            continue
        parts = line.split()
        if section is None:
            raise ParseError("expected '#taxa' header", lineno)
        if len(parts) != 2:
            raise ParseError(f"expected two fields, got {len(parts)}", lineno)
        a, b = parts
        if section == "taxa":
            v = vid(a)
            if v in labels:
                raise ParseError(f"vertex {a!r} labelled twice", lineno)
            if b in labels.values():
                from .errors import DuplicateTaxon

                raise DuplicateTaxon(f"line {lineno}: taxon {b!r} used twice")
            labels[v] = b
        else:
            if a == b:
                raise ParseError(f"self-loop at {a!r}", lineno)
            edges.append((vid(a), vid(b)))
    if not seen_taxa:
        raise ParseError("missing '#taxa' header", 1)
    names = {v: nm for nm, v in ids.items()}
    return LabeledGraph(range(len(ids)), edges, labels, names)


def write_network_edgelist(n) -> str:
    """Canonical text: lines and edge endpoints in natural name order, so
    the output depends only on names and survives a parse/write cycle."""
    g = getattr(n, "graph", n)
    lines = ["#taxa"]
    leaves = sorted((_vname(g, v), g.labels[v]) for v in g.vertices if v in g.labels)
    lines += [f"{a} {x}" for a, x in sorted(leaves, key=lambda p: _natural(p[0]))]
    lines.append("#edges")
    pairs = [sorted((_vname(g, u), _vname(g, v)), key=_natural) for u, v in g.edges]
    pairs.sort(key=lambda p: (_natural(p[0]), _natural(p[1])))
    lines += [f"{a} {b}" for a, b in pairs]
    return "\n".join(lines) + "\n"


def _natural(name: str):
    return [(0, int(tok), "") if tok.isdigit() else (1, 0, tok) for tok in re.split(r"(\d+)", name)]


def _vname(g: LabeledGraph, v: int) -> str:
    nm = g.names.get(v)
    return nm if nm is not None and nm.split() == [nm] else f"v{v}"


# ---------------------------------------------------------------------------
# PACE .gr / .td


def _data_lines(text):
    if isinstance(text, (bytes, bytearray)):
        try:
            text = bytes(text).decode("ascii")
        except UnicodeDecodeError:
            raise ParseError("input is not ASCII", 1) from None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        yield lineno, line.split()


def _int(tok: str, lineno: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"expected an integer, got {tok!r}", lineno) from None


def write_gr(g: LabeledGraph, names: bool = False) -> str:
    """``p tw n m`` then 1-indexed edges; vertices numbered in id order.

    With ``names``, vertex names and taxon labels are kept as comment lines
    (``c name <i> <name>`` / ``c taxon <i> <label>``) that other PACE tools
    ignore.
    """
    idx = {v: i + 1 for i, v in enumerate(g.vertices)}
    lines = [f"p tw {g.n} {g.m}"]
    if names:
        for v in g.vertices:
            if v in g.names and g.names[v].split() == [g.names[v]]:
                lines.append(f"c name {idx[v]} {g.names[v]}")
            if v in g.labels and g.labels[v].split() == [g.labels[v]]:
                lines.append(f"c taxon {idx[v]} {g.labels[v]}")
    lines += [f"{idx[u]} {idx[v]}" for u, v in g.edges]
    return "\n".join(lines) + "\n"


def read_gr(text) -> LabeledGraph:
    """Graph with vertex ids 0..n-1 and names "1".."n"."""
    n = m = None
    edges = []
    extra_names: dict[int, str] = {}
    labels: dict[int, str] = {}
    if isinstance(text, str):
        for lineno, raw in enumerate(text.splitlines(), start=1):
            parts = raw.split()
            if len(parts) == 4 and parts[0] == "c" and parts[1] in ("name", "taxon"):
                k = _int(parts[2], lineno)
                (extra_names if parts[1] == "name" else labels)[k] = parts[3]
    for lineno, parts in _data_lines(text):
        if parts[0] == "p":
            if n is not None:
                raise ParseError("second 'p' line", lineno)
            if len(parts) != 4 or parts[1] != "tw":
                raise ParseError("header must be 'p tw <n> <m>'", lineno)
            n, m = _int(parts[2], lineno), _int(parts[3], lineno)
            if n < 0 or m < 0:
                raise ParseError("negative count in header", lineno)
            continue
        if n is None:
            raise ParseError("edge before the 'p tw' header", lineno)
        if len(parts) != 2:
            raise ParseError("edge lines need two vertices", lineno)
        u, v = _int(parts[0], lineno), _int(parts[1], lineno)
        for x in (u, v):
            if not 1 <= x <= n:
                raise FormatIndexError(f"vertex {x} outside 1..{n}", lineno)
        if u == v:
            raise ParseError(f"self-loop at {u}", lineno)
        edges.append((u - 1, v - 1))
    if n is None:
        raise ParseError("missing 'p tw' header", 1)
    if len(edges) != m:
        raise ParseError(f"header promises {m} edges, found {len(edges)}", 1)
    names = {i: extra_names.get(i + 1, str(i + 1)) for i in range(n)}
    if len(set(names.values())) != n or any(not 1 <= k <= n for k in list(extra_names) + list(labels)):
        raise ParseError("name comments are inconsistent with the graph", 1)
    try:
        return LabeledGraph(range(n), edges, {k - 1: x for k, x in labels.items()}, names)
    except DisplayGraphError:
        raise
    except ValueError as exc:
        raise ParseError(str(exc), 1) from None


def write_td(td: TreeDecomposition, g: LabeledGraph) -> str:
    """``s td b w n`` (w = largest bag size), bag lines, then tree edges."""
    idx = {v: i + 1 for i, v in enumerate(g.vertices)}
    w = max((len(b) for b in td.bags), default=0)
    lines = [f"s td {len(td.bags)} {w} {g.n}"]
    for i, bag in enumerate(td.bags, start=1):
        members = " ".join(str(x) for x in sorted(idx[v] for v in bag))
        lines.append(f"b {i} {members}".rstrip())
    lines += [f"{a + 1} {b + 1}" for a, b in td.tree]
    return "\n".join(lines) + "\n"


def read_td(text, g: LabeledGraph | None = None) -> TreeDecomposition:
    """Decomposition over vertex ids: index k means the k-th vertex of ``g``
    in id order, or k-1 without a graph."""
    header = None
    bags: dict[int, frozenset] = {}
    tree = []
    verts = list(g.vertices) if g is not None else None
    for lineno, parts in _data_lines(text):
        if parts[0] == "s":
            if header is not None:
                raise ParseError("second 's' line", lineno)
            if len(parts) != 5 or parts[1] != "td":
                raise ParseError("header must be 's td <b> <w> <n>'", lineno)
            header = tuple(_int(x, lineno) for x in parts[2:])
            if min(header) < 0:
                raise ParseError("negative count in header", lineno)
            if verts is not None and header[2] != len(verts):
                raise ParseError(f"header has n={header[2]}, graph has {len(verts)}", lineno)
            continue
        if header is None:
            raise ParseError("content before the 's td' header", lineno)
        nb, _, nv = header
        if parts[0] == "b":
            if len(parts) < 2:
                raise ParseError("bag line without an index", lineno)
            i = _int(parts[1], lineno)
            if not 1 <= i <= nb:
                raise FormatIndexError(f"bag index {i} outside 1..{nb}", lineno)
            if i in bags:
                raise ParseError(f"bag {i} given twice", lineno)
            members = []
            for tok in parts[2:]:
                x = _int(tok, lineno)
                if not 1 <= x <= nv:
                    raise FormatIndexError(f"vertex {x} outside 1..{nv}", lineno)
                members.append(verts[x - 1] if verts is not None else x - 1)
            bags[i] = frozenset(members)
            continue
        if len(parts) != 2:
            raise ParseError("tree edge lines need two bag indices", lineno)
        a, b = _int(parts[0], lineno), _int(parts[1], lineno)
        for x in (a, b):
            if not 1 <= x <= nb:
                raise FormatIndexError(f"bag index {x} outside 1..{nb}", lineno)
        tree.append((a - 1, b - 1))
    if header is None:
        raise ParseError("missing 's td' header", 1)
    nb, w, _ = header
    if len(bags) != nb:
        raise ParseError(f"header promises {nb} bags, found {len(bags)}", 1)
    if max((len(b) for b in bags.values()), default=0) != w:
        raise ParseError("header width does not match the largest bag", 1)
    return TreeDecomposition([bags[i] for i in range(1, nb + 1)], tree)


# ---------------------------------------------------------------------------
# certificates and brambles


def write_certificate(cert: EmbeddingCertificate, n, t) -> str:
    gn, gt = n.graph, t.graph
    lines = ["#image"]
    lines += [f"{_vname(gn, u)} {_vname(gn, v)}" for u, v in cert.image_edges]
    lines.append("#map")
    for u, w in cert.vertex_map.items():
        target = gt.labels[w] if w in gt.labels else f"t{w}"
        lines.append(f"f: {_vname(gn, u)}->{target}")
    return "\n".join(lines) + "\n"


def read_certificate(text: str, n, t) -> EmbeddingCertificate:
    gn, gt = n.graph, t.graph
    by_name = {_vname(gn, v): v for v in gn.vertices}
    edges, fmap = [], {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("f:"):
            body = line[2:].strip()
            if "->" not in body:
                raise ParseError("map lines look like 'f: u->v'", lineno)
            a, b = (s.strip() for s in body.split("->", 1))
            if a not in by_name:
                raise ParseError(f"unknown network vertex {a!r}", lineno)
            if b in gt.labels.values():
                w = gt.vertex_of_label(b)
            elif b.startswith("t") and b[1:].isdigit() and int(b[1:]) in gt:
                w = int(b[1:])
            else:
                raise ParseError(f"unknown tree vertex {b!r}", lineno)
            fmap[by_name[a]] = w
            continue
        parts = line.split()
        if len(parts) != 2 or any(p not in by_name for p in parts):
            raise ParseError("image lines hold two network vertices", lineno)
        edges.append((by_name[parts[0]], by_name[parts[1]]))
    return EmbeddingCertificate(edges, fmap)


def write_bramble(b: Bramble, g: LabeledGraph | None = None) -> str:
    """One element per line; members sorted, written by name when known."""
    lines = []
    for el in b.elements:
        toks = sorted((g.display_name(x) if g is not None and isinstance(x, int) else str(x)) for x in el)
        lines.append(" ".join(toks))
    return "\n".join(lines) + "\n"


def read_bramble(text: str) -> Bramble:
    els = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        els.append(frozenset(line.split()))
    return Bramble(els)


def read_graph(text: str) -> LabeledGraph:
    """Sniff the format: ``p tw`` header -> .gr, ``#taxa`` -> edge list."""
    for raw in text.splitlines():
        line = raw.strip()
        if not line or (line.startswith("c") and not line.startswith("#")):
            continue
        if line.startswith("p "):
            return read_gr(text)
        if line.lower().startswith("#taxa"):
            return _parse_edgelist_graph(text)
        break
    raise ParseError("unrecognised graph format (expected 'p tw' or '#taxa')", 1)


__all__ = [
    "FileFormat",
    "DisplayGraphError",
    "parse_newick",
    "write_newick",
    "parse_network_edgelist",
    "write_network_edgelist",
    "read_gr",
    "write_gr",
    "read_td",
    "write_td",
    "write_certificate",
    "read_certificate",
    "write_bramble",
    "read_bramble",
    "read_graph",
]
