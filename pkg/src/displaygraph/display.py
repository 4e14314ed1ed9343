"""Tree containment: does a network N display a tree T?

Two independent deciders live here. ``find_display`` branches on deleting
edges of short cycles and tests each resulting tree for labelled
isomorphism with T, returning an embedding certificate. The quartet
characterisation (some spanning tree of N has exactly T's quartets) is
implemented literally by ``displays_via_quartets`` and serves as the
cross-check.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from functools import total_ordering
from types import MappingProxyType
from typing import Iterable, Mapping

from .core import LabeledGraph, PhyloTree, reticulation_number, suppress_with_chains
from .errors import (
    InvalidCertificate,
    LimitExceeded,
    PreconditionError,
    TaxonMismatch,
    TaxonMissing,
    TooFewTaxa,
)
from .report import ValidityReport


@dataclass(frozen=True)
class EmbeddingCertificate:
    """Image subtree N' (edges of N) and the surjection f: V(N') -> V(T)."""

    image_edges: tuple[tuple[int, int], ...]
    vertex_map: Mapping[int, int] = field(hash=False)

    def __init__(self, image_edges: Iterable[tuple[int, int]], vertex_map: Mapping[int, int]):
        object.__setattr__(self, "image_edges", tuple(sorted(tuple(sorted(e)) for e in image_edges)))
        object.__setattr__(self, "vertex_map", MappingProxyType(dict(sorted(vertex_map.items()))))

    def image_vertices(self) -> set[int]:
        return {x for e in self.image_edges for x in e}


# ---------------------------------------------------------------------------
# certificates


def verify_embedding(n, t, cert: EmbeddingCertificate) -> ValidityReport:
    """Check that the image is a subtree of N and that f satisfies: taxa are
    fixed, fibres are connected, and each edge of T has exactly one image edge."""
    report = ValidityReport()
    gn, gt = n.graph, t.graph
    if set(n.taxa) != set(t.taxa):
        report.add("taxa", sorted(set(n.taxa) ^ set(t.taxa)), "taxon sets differ")
        return report
    edges = cert.image_edges
    for e in edges:
        if not gn.has_edge(*e):
            report.add("image", e, "not an edge of the network")
    if len(set(edges)) != len(edges):
        report.add("image", edges, "repeated image edge")
    image_vs = cert.image_vertices()
    if not edges and len(t.taxa) == 1:
        image_vs = {gn.vertex_of_label(t.taxa[0])}
    if report.violations:
        return report
    img = LabeledGraph(image_vs, edges)
    if not img.is_tree():
        report.add("subtree", len(edges), f"image has {len(image_vs)} vertices, {len(edges)} edges, "
                   f"{len(img.components())} components")
    f = cert.vertex_map
    for v in sorted(image_vs - set(f)):
        report.add("domain", v, "image vertex without an f-value")
    for v in sorted(set(f) - image_vs):
        report.add("domain", v, "f defined outside the image")
    tv = set(gt.vertices)
    for v, w in f.items():
        if w not in tv:
            report.add("codomain", (v, w), "f-value is not a vertex of T")
    missing = tv - set(f.values())
    for w in sorted(missing):
        report.add("surjective", w, "vertex of T with empty fibre")
    for x in t.taxa:
        nv, tx = gn.vertex_of_label(x), gt.vertex_of_label(x)
        if f.get(nv) != tx:
            report.add("condition1", x, "taxon not mapped to itself")
    fibres: dict[int, set[int]] = {}
    for v, w in f.items():
        if v in image_vs:
            fibres.setdefault(w, set()).add(v)
    for w, fib in sorted(fibres.items()):
        if len(fib) > 1 and not img.induced_subgraph(fib).is_connected():
            report.add("condition2", w, "fibre does not induce a connected subtree")
    hits: dict[tuple[int, int], int] = {}
    for a, b in edges:
        fa, fb = f.get(a), f.get(b)
        if fa is None or fb is None or fa == fb:
            continue
        key = (fa, fb) if fa < fb else (fb, fa)
        if not gt.has_edge(*key):
            report.add("condition3", (a, b), "image edge joins fibres of non-adjacent tree vertices")
            continue
        hits[key] = hits.get(key, 0) + 1
    for e in gt.edges:
        c = hits.get(e, 0)
        if c != 1:
            report.add("condition3", e, f"{c} image edges map onto this tree edge")
    return report


def certificate_from_image(n, t, image_edges, branch_map: Mapping[int, int]) -> EmbeddingCertificate:
    """Build f from an image subtree and the positions of T's internal vertices.

    ``branch_map`` sends each internal vertex of T to its vertex in N. A
    degree-2 vertex on the path realising edge {a, b} of T goes to whichever
    end is nearer along the path; a midpoint goes to the end whose image
    has the smaller vertex id.
    """
    gn, gt = n.graph, t.graph
    img = gn.edge_subgraph(image_edges)
    place = dict(branch_map)
    for x in t.taxa:
        place[gt.vertex_of_label(x)] = gn.vertex_of_label(x)
    if set(place) != set(gt.vertices):
        raise InvalidCertificate("branch map does not cover the internal vertices of T")
    f: dict[int, int] = {}
    for tv, nv in place.items():
        if nv in f or (nv not in img and img.n):
            raise InvalidCertificate(f"vertex {nv} of N is not a distinct image vertex")
        f[nv] = tv
    for a, b in gt.edges:
        path = _tree_path(img, place[a], place[b])
        if path is None:
            raise InvalidCertificate(f"no image path for tree edge {(a, b)}")
        inner = path[1:-1]
        t_len = len(inner)
        for i, v in enumerate(inner, start=1):
            if v in f:
                raise InvalidCertificate(f"image paths overlap at vertex {v}")
            da, db = i, t_len + 1 - i
            if da < db or (da == db and place[a] < place[b]):
                f[v] = a
            else:
                f[v] = b
    if set(f) != set(img.vertices) and img.n:
        extra = sorted(set(img.vertices) - set(f))
        raise InvalidCertificate(f"image vertices {extra[:5]} lie on no tree-edge path")
    return EmbeddingCertificate(img.edges, f)


def _tree_path(g: LabeledGraph, s: int, t: int):
    if s == t:
        return [s]
    if s not in g or t not in g:
        return None
    prev = {s: None}
    queue = deque([s])
    while queue:
        x = queue.popleft()
        if x == t:
            break
        for y in g.neighbors(x):
            if y not in prev:
                prev[y] = x
                queue.append(y)
    if t not in prev:
        return None
    path = [t]
    while path[-1] != s:
        path.append(prev[path[-1]])
    return path[::-1]


def identity_certificate(t: PhyloTree) -> EmbeddingCertificate:
    """Certificate for N = T (the tree viewed as a network)."""
    return EmbeddingCertificate(t.graph.edges, {v: v for v in t.graph.vertices})


# ---------------------------------------------------------------------------
# restriction, isomorphism, quartets


def steiner_edges(g: LabeledGraph, keep: Iterable[int]) -> list[tuple[int, int]]:
    """Edges of the minimal subtree of tree ``g`` spanning ``keep``."""
    keep = set(keep)
    deg = {v: g.degree(v) for v in g.vertices}
    alive = set(g.vertices)
    stack = [v for v in g.vertices if deg[v] <= 1 and v not in keep]
    while stack:
        v = stack.pop()
        if v not in alive:
            continue
        alive.discard(v)
        for w in g.neighbors(v):
            if w in alive:
                deg[w] -= 1
                if deg[w] <= 1 and w not in keep:
                    stack.append(w)
    return [e for e in g.edges if e[0] in alive and e[1] in alive]


def restrict_and_suppress(spanning_tree: LabeledGraph, taxa: Iterable[str]) -> PhyloTree:
    """Minimal subtree spanning the taxa, degree-2 vertices suppressed.

    Surviving vertices keep their ids, so the result's internal vertices are
    the branch points of the restriction inside the input.
    """
    taxa = list(taxa)
    missing = [x for x in taxa if x not in spanning_tree.labels.values()]
    if missing:
        raise TaxonMissing(f"taxa absent from the tree: {sorted(missing)}")
    if not spanning_tree.is_tree():
        raise PreconditionError("input is not a tree")
    keep = {spanning_tree.vertex_of_label(x) for x in taxa}
    es = steiner_edges(spanning_tree, keep)
    if es:
        sub = spanning_tree.edge_subgraph(es)
    else:
        sub = spanning_tree.induced_subgraph(keep)
    sub = sub.with_labels({v: l for v, l in sub.labels.items() if l in set(taxa)})
    out, _ = suppress_with_chains(sub, keep_labels=True)
    return PhyloTree(out)


def _rooted_clusters(t: PhyloTree) -> dict[int, frozenset]:
    """Cluster below each vertex when rooting at the smallest taxon."""
    g = t.graph
    root = g.vertex_of_label(t.taxa[0])
    parent = {root: None}
    order = [root]
    for x in order:
        for y in g.neighbors(x):
            if y not in parent:
                parent[y] = x
                order.append(y)
    clusters: dict[int, frozenset] = {}
    for x in reversed(order):
        if x in g.labels and x != root:
            clusters[x] = frozenset([g.labels[x]])
        else:
            acc = frozenset()
            for y in g.neighbors(x):
                if parent.get(y) == x:
                    acc |= clusters[y]
            clusters[x] = acc
    return clusters


def canonical_form(t: PhyloTree) -> str:
    """Newick-like string, rooted at the smallest taxon, children sorted."""
    g = t.graph
    if len(t.taxa) == 1:
        return f"({t.taxa[0]});"
    root = g.vertex_of_label(t.taxa[0])

    def enc(v, par):
        if v in g.labels:
            return g.labels[v]
        parts = sorted(enc(w, v) for w in g.neighbors(v) if w != par)
        return "(" + ",".join(parts) + ")"

    (child,) = g.neighbors(root)
    return f"({t.taxa[0]},{enc(child, root)});"


def labeled_tree_isomorphic(t1: PhyloTree, t2: PhyloTree) -> bool:
    if set(t1.taxa) != set(t2.taxa):
        raise TaxonMismatch("trees are on different taxon sets")
    return canonical_form(t1) == canonical_form(t2)


def tree_isomorphism(t1: PhyloTree, t2: PhyloTree) -> dict[int, int] | None:
    """Label-respecting vertex bijection V(t1) -> V(t2), or None."""
    if set(t1.taxa) != set(t2.taxa):
        raise TaxonMismatch("trees are on different taxon sets")
    c1, c2 = _rooted_clusters(t1), _rooted_clusters(t2)
    root1 = t1.graph.vertex_of_label(t1.taxa[0])
    root2 = t2.graph.vertex_of_label(t2.taxa[0])
    inv2 = {c: v for v, c in c2.items() if v != root2}
    out = {root1: root2}
    for v, c in c1.items():
        if v == root1:
            continue
        w = inv2.get(c)
        if w is None:
            return None
        out[v] = w
    if len(out) != t2.graph.n or len(set(out.values())) != len(out):
        return None
    return out


def tree_splits(t: PhyloTree) -> set[frozenset]:
    """Bipartitions of X induced by the edges of T, each stored as the side
    not containing the smallest taxon."""
    clusters = _rooted_clusters(t)
    root = t.graph.vertex_of_label(t.taxa[0])
    return {c for v, c in clusters.items() if v != root}


@total_ordering
@dataclass(frozen=True)
class Quartet:
    """Quartet ab|cd in canonical form: a<b, c<d, (a, b) < (c, d)."""

    a: str
    b: str
    c: str
    d: str

    @classmethod
    def of(cls, a, b, c, d) -> "Quartet":
        if len({a, b, c, d}) != 4:
            raise ValueError("a quartet needs four distinct taxa")
        p, q = tuple(sorted((a, b))), tuple(sorted((c, d)))
        if q < p:
            p, q = q, p
        return cls(p[0], p[1], q[0], q[1])

    def __lt__(self, other) -> bool:
        return (self.a, self.b, self.c, self.d) < (other.a, other.b, other.c, other.d)

    def __str__(self) -> str:
        return f"{self.a},{self.b}|{self.c},{self.d}"


def _taxon_distances(g: LabeledGraph, taxa) -> dict[str, dict[str, int]]:
    out = {}
    lab_v = {x: g.vertex_of_label(x) for x in taxa}
    for x, s in lab_v.items():
        dist = {s: 0}
        queue = deque([s])
        while queue:
            v = queue.popleft()
            for w in g.neighbors(v):
                if w not in dist:
                    dist[w] = dist[v] + 1
                    queue.append(w)
        out[x] = {y: dist[lab_v[y]] for y in taxa if lab_v[y] in dist}
    return out


def quartets_of_tree_graph(g: LabeledGraph, taxa) -> set[Quartet]:
    """Quartets displayed by any tree graph (degree-2 vertices and
    taxon-free pendant parts allowed) via the four-point condition."""
    taxa = sorted(taxa)
    d = _taxon_distances(g, taxa)
    out = set()
    for a, b, c, e in itertools.combinations(taxa, 4):
        s1 = d[a][b] + d[c][e]
        s2 = d[a][c] + d[b][e]
        s3 = d[a][e] + d[b][c]
        if s1 < s2 and s1 < s3:
            out.add(Quartet.of(a, b, c, e))
        elif s2 < s1 and s2 < s3:
            out.add(Quartet.of(a, c, b, e))
        elif s3 < s1 and s3 < s2:
            out.add(Quartet.of(a, e, b, c))
    return out


def quartet_set(t: PhyloTree) -> set[Quartet]:
    if len(t.taxa) < 4:
        raise TooFewTaxa(f"quartets need at least 4 taxa, got {len(t.taxa)}")
    return quartets_of_tree_graph(t.graph, t.taxa)


# ---------------------------------------------------------------------------
# deciders


@dataclass
class SearchStats:
    nodes: int = 0
    leaves: int = 0
    pruned_split: int = 0
    pruned_forced: int = 0

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def displays_via_quartets(n, t, limit: int | None = 2_000_000) -> bool:
    """True iff deleting some r(N) edges of N leaves a spanning tree whose
    quartets are exactly those of T. ``limit`` caps the number of edge
    subsets examined; exceeding it raises LimitExceeded."""
    if len(t.taxa) < 4:
        raise TooFewTaxa("the quartet oracle needs at least 4 taxa")
    if set(n.taxa) != set(t.taxa):
        raise TaxonMismatch("network and tree are on different taxon sets")
    g = n.graph
    r = reticulation_number(n)
    total = math.comb(g.m, r)
    if limit is not None and total > limit:
        raise LimitExceeded(f"{total} edge subsets exceed the limit {limit}", {"subsets": total})
    target = quartet_set(t)
    for drop in itertools.combinations(range(g.m), r):
        dropped = set(drop)
        sub = LabeledGraph(g.vertices, [e for i, e in enumerate(g.edges) if i not in dropped], g.labels)
        if not sub.is_connected():
            continue
        if quartets_of_tree_graph(sub, t.taxa) == target:
            return True
    return False


def find_display(n, t, node_limit: int | None = 1_000_000, stats: SearchStats | None = None):
    """Certificate that ``n`` displays ``t``, or None if it does not.

    Branches on deleting each edge of a shortest cycle (edges earlier in the
    cycle are kept in later branches, so every edge subset is visited once),
    after trimming parts of the graph that cannot carry taxa. Bridges whose
    taxon split is not a split of T prune the branch. At an acyclic leaf the
    restriction to X is compared with T. Raises LimitExceeded when the node
    budget runs out, which is distinct from a "no" answer.
    """
    if set(n.taxa) != set(t.taxa):
        raise TaxonMismatch("network and tree are on different taxon sets")
    if len(t.taxa) < 3:
        raise PreconditionError("find_display needs |X| >= 3")
    stats = stats if stats is not None else SearchStats()
    g = n.graph
    splits = tree_splits(t)
    x0 = t.taxa[0]
    target = canonical_form(t)
    labeled = dict(g.labels)

    def search(adj: dict[int, set[int]], forced: frozenset):
        stats.nodes += 1
        if node_limit is not None and stats.nodes > node_limit:
            raise LimitExceeded("find_display node budget exhausted", stats.as_dict())
        adj = _trim(adj, labeled)
        bridges = _bridges(adj)
        for u, v in bridges:
            side = _side_taxa(adj, u, v, labeled)
            other = set(labeled.values()) - side
            if not side or not other:
                continue
            canon = frozenset(other if x0 in side else side)
            if canon not in splits:
                stats.pruned_split += 1
                return None
        cycle = _shortest_cycle(adj)
        if cycle is None:
            stats.leaves += 1
            tree = LabeledGraph(adj, {(u, w) for u in adj for w in adj[u] if u < w}, labeled)
            cand = restrict_and_suppress(tree, t.taxa)
            if canonical_form(cand) != target:
                return None
            iso = tree_isomorphism(t, cand)
            branch = {tv: nv for tv, nv in iso.items() if tv not in t.graph.labels}
            return certificate_from_image(n, t, tree.edges, branch)
        free = [e for e in cycle if e not in forced]
        if not free:
            stats.pruned_forced += 1
            return None
        keep = set(forced)
        for e in cycle:
            if e in forced:
                continue
            a, b = e
            child = {v: set(ns) for v, ns in adj.items()}
            child[a].discard(b)
            child[b].discard(a)
            found = search(child, frozenset(keep))
            if found is not None:
                return found
            keep.add(e)
        return None

    start = {v: set(g.neighbors(v)) for v in g.vertices}
    return search(start, frozenset())


def _trim(adj: dict[int, set[int]], labeled) -> dict[int, set[int]]:
    """Drop unlabelled vertices of degree <= 1 and taxon-free pieces hanging
    off a bridge; neither can lie on the restriction to X."""
    adj = {v: set(ns) for v, ns in adj.items()}
    stack = [v for v in adj if len(adj[v]) <= 1 and v not in labeled]
    while stack:
        v = stack.pop()
        if v not in adj:
            continue
        for w in adj.pop(v):
            adj[w].discard(v)
            if len(adj[w]) <= 1 and w not in labeled:
                stack.append(w)
    for u, v in sorted(_bridges(adj)):
        if u not in adj or v not in adj or v not in adj[u]:
            continue
        for a, b in ((u, v), (v, u)):
            comp = _component_without_edge(adj, b, a)
            if not any(x in labeled for x in comp):
                for x in comp:
                    for w in adj.pop(x):
                        if w in adj:
                            adj[w].discard(x)
                break
    return adj


def _component_without_edge(adj, start, blocked) -> set[int]:
    seen = {start}
    stack = [start]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y not in seen and not (x == start and y == blocked):
                seen.add(y)
                stack.append(y)
    return seen


def _side_taxa(adj, u, v, labeled) -> set[str]:
    comp = _component_without_edge(adj, v, u)
    return {labeled[x] for x in comp if x in labeled}


def _bridges(adj: dict[int, set[int]]) -> list[tuple[int, int]]:
    disc: dict[int, int] = {}
    low: dict[int, int] = {}
    out = []
    timer = 0
    for root in sorted(adj):
        if root in disc:
            continue
        disc[root] = low[root] = timer
        timer += 1
        stack = [(root, None, iter(sorted(adj[root])))]
        while stack:
            v, par, it = stack[-1]
            advanced = False
            for w in it:
                if w == par:
                    continue
                if w not in disc:
                    disc[w] = low[w] = timer
                    timer += 1
                    stack.append((w, v, iter(sorted(adj[w]))))
                    advanced = True
                    break
                low[v] = min(low[v], disc[w])
            if advanced:
                continue
            stack.pop()
            if par is not None:
                low[par] = min(low[par], low[v])
                if low[v] > disc[par]:
                    out.append((min(par, v), max(par, v)))
    return out


def _shortest_cycle(adj: dict[int, set[int]]):
    """Edges of a shortest cycle (deterministic choice), or None."""
    best = None
    for s in sorted(adj):
        if best is not None and len(best) == 3:
            break
        dist = {s: 0}
        parent = {s: None}
        queue = deque([s])
        found = None
        while queue and found is None:
            x = queue.popleft()
            if best is not None and 2 * dist[x] + 1 >= len(best):
                break
            for y in sorted(adj[x]):
                if y == parent[x]:
                    continue
                if y in dist:
                    if dist[y] >= dist[x]:
                        found = (x, y)
                        break
                    continue
                dist[y] = dist[x] + 1
                parent[y] = x
                queue.append(y)
        if found is None:
            continue
        x, y = found
        px, py = [x], [y]
        while parent[px[-1]] is not None:
            px.append(parent[px[-1]])
        while parent[py[-1]] is not None:
            py.append(parent[py[-1]])
        # walk both back to the root; cut at their meeting point
        sx = set(px)
        meet = next(v for v in py if v in sx)
        cyc_vertices = px[: px.index(meet) + 1][::-1] + py[: py.index(meet)]
        cyc_vertices = cyc_vertices  # meet ... x, y ... (back to meet)
        loop = px[: px.index(meet)][::-1]
        path = [meet] + loop + py[: py.index(meet)]
        if len(path) < 3 or len(set(path)) != len(path):
            continue
        edges = [tuple(sorted((path[i], path[(i + 1) % len(path)]))) for i in range(len(path))]
        if best is None or len(edges) < len(best):
            best = edges
    return best
