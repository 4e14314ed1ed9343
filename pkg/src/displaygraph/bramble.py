"""Brambles: verification, exact order by branch and bound, and the
treewidth lower bound order - 1."""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Hashable, Iterable, Sequence

from .core import LabeledGraph
from .errors import LimitExceeded
from .report import ValidityReport


@dataclass(frozen=True)
class Bramble:
    """Elements as vertex references: names (str) or vertex ids (int).

    References to vertices absent from the host graph are dropped when the
    bramble is resolved, so a bramble written against the unreduced
    construction can be checked on the reduced graph.
    """

    elements: tuple[frozenset, ...]

    def __init__(self, elements: Iterable[Iterable[Hashable]]):
        object.__setattr__(self, "elements", tuple(frozenset(e) for e in elements))

    def __len__(self) -> int:
        return len(self.elements)

    def resolve(self, g: LabeledGraph) -> list[frozenset[int]]:
        return [frozenset(x for x in (_lookup(g, ref) for ref in el) if x is not None) for el in self.elements]


def _lookup(g: LabeledGraph, ref):
    if isinstance(ref, str):
        if g.has_name(ref):
            return g.vertex_of_name(ref)
        if ref in g.labels.values():
            return g.vertex_of_label(ref)
        return None
    return ref if ref in g else None


def verify_bramble(g: LabeledGraph, b: Bramble) -> ValidityReport:
    """Each element must be non-empty and connected, and every two elements
    must touch (share a vertex or be joined by an edge)."""
    report = ValidityReport()
    els = b.resolve(g)
    for i, el in enumerate(els):
        if not el:
            report.add("empty", i, "element has no vertex in the graph")
        elif len(el) > 1 and not g.induced_subgraph(el).is_connected():
            report.add("connected", i, "element does not induce a connected subgraph")
    closed = []
    for el in els:
        nb = set(el)
        for v in el:
            nb.update(g.neighbors(v))
        closed.append(nb)
    for i in range(len(els)):
        for j in range(i + 1, len(els)):
            if els[i] and els[j] and not (closed[i] & els[j]):
                report.add("touch", (i, j), "elements neither meet nor are adjacent")
    return report


def is_hitting_set(g: LabeledGraph, b: Bramble, vertices: Iterable) -> bool:
    hit = {_lookup(g, v) for v in vertices} - {None}
    return all(el & hit for el in b.resolve(g))


# ---------------------------------------------------------------------------
# minimum hitting set


@dataclass
class HittingStats:
    nodes: int = 0
    memo_hits: int = 0
    lb: int = 0
    ub: int = 0

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def min_hitting_set(
    g: LabeledGraph,
    b: Bramble,
    node_limit: int | None = 50_000_000,
    time_limit: float | None = None,
    stats: HittingStats | None = None,
) -> tuple[int, frozenset[int]]:
    """Exact minimum hitting set of the resolved elements.

    Elements are ordered largest first (ties by smallest vertex id). The
    search repeatedly picks the uncovered element with the fewest useful
    vertices and branches on which of them to take. Supersets of other
    elements, and vertices whose element set is contained in another
    vertex's, are removed up front. Bounds: greedy packing of pairwise
    vertex-disjoint uncovered elements, and uncovered count divided by the
    best single-vertex coverage.
    """
    stats = stats if stats is not None else HittingStats()
    els = [el for el in b.resolve(g)]
    if any(not el for el in els):
        raise ValueError("bramble has an element with no vertex in the graph")
    if not els:
        return 0, frozenset()
    els = sorted(set(els), key=lambda e: (-len(e), min(e), sorted(e)))
    els = _drop_supersets(els)
    verts, cover = _vertex_cover_masks(els)
    m = len(els)
    full = (1 << m) - 1
    cand = [[k for k, c in enumerate(cover) if c >> i & 1] for i in range(m)]

    greedy = _greedy(cover, full)
    best = [len(greedy), list(greedy)]
    stats.ub = best[0]
    deadline = None if time_limit is None else time.monotonic() + time_limit
    failed: dict[int, int] = {}

    def lower(unc: int) -> int:
        if not unc:
            return 0
        # disjoint packing over candidate-vertex sets
        used = 0
        pack = 0
        rest = unc
        while rest:
            low = rest & -rest
            i = low.bit_length() - 1
            rest ^= low
            vs = 0
            for k in cand[i]:
                vs |= 1 << k
            if not vs & used:
                used |= vs
                pack += 1
        top = max(_popcount(c & unc) for c in cover)
        return max(pack, -(-_popcount(unc) // top))

    def search(unc: int, chosen: list[int], budget: int) -> bool:
        """Can ``unc`` be hit with at most ``budget`` more vertices?"""
        stats.nodes += 1
        if node_limit is not None and stats.nodes > node_limit:
            raise LimitExceeded("hitting-set node budget exhausted", stats.as_dict())
        if deadline is not None and stats.nodes & 1023 == 0 and time.monotonic() > deadline:
            raise LimitExceeded("hitting-set time limit reached", stats.as_dict())
        if not unc:
            best[0], best[1] = len(chosen), list(chosen)
            return True
        if budget <= 0 or lower(unc) > budget:
            return False
        if failed.get(unc, -1) >= budget:
            stats.memo_hits += 1
            return False
        pick, pick_n = -1, None
        rest = unc
        while rest:
            low = rest & -rest
            i = low.bit_length() - 1
            rest ^= low
            nc = sum(1 for k in cand[i] if cover[k] & unc)
            if pick_n is None or nc < pick_n:
                pick, pick_n = i, nc
        options = sorted(cand[pick], key=lambda k: (-_popcount(cover[k] & unc), k))
        for k in options:
            chosen.append(k)
            ok = search(unc & ~cover[k], chosen, budget - 1)
            chosen.pop()
            if ok:
                return True
        failed[unc] = max(failed.get(unc, -1), budget)
        return False

    lb = lower(full)
    stats.lb = lb
    for k in range(lb, best[0]):
        if search(full, [], k):
            break
        stats.lb = k + 1
    stats.lb = stats.ub = best[0]
    return best[0], frozenset(verts[k] for k in best[1])


def _popcount(x: int) -> int:
    return bin(x).count("1")


def _drop_supersets(els: Sequence[frozenset]) -> list[frozenset]:
    out = []
    for i, e in enumerate(els):
        if any(j != i and f < e for j, f in enumerate(els)):
            continue
        out.append(e)
    return out


def _vertex_cover_masks(els: Sequence[frozenset]) -> tuple[list[int], list[int]]:
    """Useful vertices and, for each, the bitmask of elements it hits.

    Vertices with identical masks collapse to the smallest id; vertices whose
    mask is strictly contained in another's are dropped.
    """
    masks: dict[int, int] = {}
    for i, e in enumerate(els):
        for v in e:
            masks[v] = masks.get(v, 0) | (1 << i)
    by_mask: dict[int, int] = {}
    for v in sorted(masks):
        by_mask.setdefault(masks[v], v)
    items = sorted(by_mask.items(), key=lambda kv: (-_popcount(kv[0]), kv[1]))
    keep = []
    for mask, v in items:
        if any(mask & other == mask for other, _ in keep):
            continue
        keep.append((mask, v))
    keep.sort(key=lambda mv: mv[1])
    return [v for _, v in keep], [mk for mk, _ in keep]


def _greedy(cover: list[int], full: int) -> list[int]:
    unc = full
    out = []
    while unc:
        k = max(range(len(cover)), key=lambda i: (_popcount(cover[i] & unc), -i))
        out.append(k)
        unc &= ~cover[k]
    return out


def bramble_order(g: LabeledGraph, b: Bramble, **limits) -> int:
    return min_hitting_set(g, b, **limits)[0]


def tw_lower_bound(g: LabeledGraph, b: Bramble, **limits) -> int:
    """Order minus one; a certified lower bound on tw(g) for a valid bramble."""
    return min_hitting_set(g, b, **limits)[0] - 1
