"""Tree decompositions: validation, heuristic upper bounds, minor-min-width
lower bound and exact treewidth for desk-scale graphs.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from . import _kernels
from .core import LabeledGraph
from .errors import BudgetExceeded, InvalidDecomposition
from .report import ValidityReport

DP_BUDGET = 24


@dataclass(frozen=True)
class TreeDecomposition:
    """Bags plus an undirected tree over bag indices."""

    bags: tuple[frozenset, ...]
    tree: tuple[tuple[int, int], ...]

    def __init__(self, bags: Iterable[Iterable], tree: Iterable[tuple[int, int]] = ()):
        object.__setattr__(self, "bags", tuple(frozenset(b) for b in bags))
        object.__setattr__(self, "tree", tuple(tuple(sorted(e)) for e in tree))

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1

    def map_vertices(self, f) -> "TreeDecomposition":
        """Apply ``f`` (callable or mapping) to every bag member."""
        fn = f.__getitem__ if hasattr(f, "__getitem__") else f
        return TreeDecomposition([{fn(x) for x in b} for b in self.bags], self.tree)

    def is_path(self) -> bool:
        deg = [0] * len(self.bags)
        for a, b in self.tree:
            deg[a] += 1
            deg[b] += 1
        return all(d <= 2 for d in deg)

    def __len__(self) -> int:
        return len(self.bags)


def _tree_violations(td: TreeDecomposition, report: ValidityReport) -> bool:
    q = len(td.bags)
    ok = True
    for a, b in td.tree:
        if not (0 <= a < q and 0 <= b < q) or a == b:
            report.add("tree", (a, b), "tree edge references an invalid bag index")
            ok = False
    if not ok:
        return False
    if q and len(td.tree) != q - 1:
        report.add("tree", len(td.tree), f"{q} bags need exactly {q - 1} tree edges")
        ok = False
    adj = [[] for _ in range(q)]
    for a, b in td.tree:
        adj[a].append(b)
        adj[b].append(a)
    if q:
        seen = {0}
        stack = [0]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        if len(seen) != q:
            report.add("tree", min(set(range(q)) - seen), "decomposition tree is disconnected")
            ok = False
    return ok


def validate_decomposition(g: LabeledGraph, td: TreeDecomposition) -> ValidityReport:
    """Check (tw1)-(tw3) and the tree shape; every failure carries a witness."""
    report = ValidityReport(width=td.width)
    tree_ok = _tree_violations(td, report)
    present = set().union(*td.bags) if td.bags else set()
    vset = set(g.vertices)
    for v in g.vertices:
        if v not in present:
            report.add("tw1", v, "vertex in no bag")
    for v in sorted(present - vset, key=repr):
        report.add("tw1", v, "bag member is not a vertex of the graph")
    where: dict = {}
    for i, bag in enumerate(td.bags):
        for v in bag:
            where.setdefault(v, []).append(i)
    for u, v in dict.fromkeys(g.edges):
        bu, bv = where.get(u, ()), where.get(v, ())
        if not set(bu).intersection(bv):
            report.add("tw2", (u, v), "edge in no bag")
    if tree_ok:
        adj = [[] for _ in td.bags]
        for a, b in td.tree:
            adj[a].append(b)
            adj[b].append(a)
        for v in g.vertices:
            idx = where.get(v)
            if not idx:
                continue
            allowed = set(idx)
            seen = {idx[0]}
            stack = [idx[0]]
            while stack:
                x = stack.pop()
                for y in adj[x]:
                    if y in allowed and y not in seen:
                        seen.add(y)
                        stack.append(y)
            if len(seen) != len(allowed):
                report.add("tw3", v, "bags containing the vertex are not connected")
    return report


def require_valid(g: LabeledGraph, td: TreeDecomposition) -> None:
    rep = validate_decomposition(g, td)
    if not rep.valid:
        raise InvalidDecomposition("; ".join(str(v) for v in rep.violations[:5]))


# ---------------------------------------------------------------------------
# elimination orderings


def decomposition_from_order(adj: dict, order: Sequence) -> TreeDecomposition:
    """Tree decomposition induced by eliminating vertices in ``order``."""
    if not order:
        return TreeDecomposition([], [])
    h = {v: set(ns) for v, ns in adj.items()}
    pos = {v: i for i, v in enumerate(order)}
    bags = []
    for v in order:
        nb = h[v]
        bags.append(frozenset(nb | {v}))
        for a in nb:
            h[a] |= nb
            h[a].discard(a)
            h[a].discard(v)
        del h[v]
    tree = []
    roots = []
    for i, v in enumerate(order):
        later = [pos[u] for u in bags[i] if u != v]
        if later:
            tree.append((i, min(later)))
        else:
            roots.append(i)
    for a, b in zip(roots, roots[1:]):
        tree.append((a, b))
    return TreeDecomposition(bags, tree)


def _greedy_order(adj: dict, strategy: str) -> list:
    h = {v: set(ns) for v, ns in adj.items()}
    order = []
    while h:
        if strategy == "min-degree":
            v = min(h, key=lambda x: (len(h[x]), x))
        elif strategy == "min-fill":
            def fill(x):
                nb = list(h[x])
                f = 0
                for i, a in enumerate(nb):
                    ha = h[a]
                    for b in nb[i + 1:]:
                        if b not in ha:
                            f += 1
                return f

            v = min(h, key=lambda x: (fill(x), x))
        else:
            raise ValueError(f"unknown strategy {strategy!r}")
        nb = h.pop(v)
        for a in nb:
            h[a] |= nb
            h[a].discard(a)
            h[a].discard(v)
        order.append(v)
    return order


def heuristic_ub(g: LabeledGraph, strategy: str = "min-fill") -> TreeDecomposition:
    """Greedy elimination decomposition; ties broken by lowest vertex id."""
    adj = g.simple_adjacency()
    return decomposition_from_order(adj, _greedy_order(adj, strategy))


def lower_bound_mmd(g: LabeledGraph) -> int:
    """Minor-min-width (MMD+ with the min-d contraction rule)."""
    h = g.simple_adjacency()
    lb = 0
    while len(h) > 1:
        v = min(h, key=lambda x: (len(h[x]), x))
        lb = max(lb, len(h[v]))
        nb = h.pop(v)
        if not nb:
            continue
        u = min(nb, key=lambda x: (len(h[x]), x))
        for a in nb:
            h[a].discard(v)
        for a in nb:
            if a != u:
                h[a].add(u)
                h[u].add(a)
    return lb


# ---------------------------------------------------------------------------
# exact treewidth


@dataclass
class _Limits:
    node_limit: int | None
    deadline: float | None


def exact_treewidth(
    g: LabeledGraph,
    budget: int = DP_BUDGET,
    node_limit: int | None = 5_000_000,
    time_limit: float | None = None,
) -> tuple[int, TreeDecomposition]:
    """Exact treewidth with a witnessing decomposition.

    Works per biconnected component of the simple underlying graph. Blocks
    with at most ``budget`` vertices go through subset dynamic programming;
    larger ones through branch and bound over elimination orderings. Raises
    ``BudgetExceeded`` carrying the best (lb, ub) if a limit is hit.
    """
    simple = g.simple()
    adj = simple.simple_adjacency()
    if simple.n == 0:
        return -1, TreeDecomposition([], [])
    limits = _Limits(node_limit, None if time_limit is None else time.monotonic() + time_limit)
    blocks = _blocks(adj)
    results = []
    width = 0 if simple.n else -1
    lb_all = 0
    ub_all = 0
    failed = None
    for block in blocks:
        sub = {v: adj[v] & block for v in block}
        try:
            w, order = _exact_block(sub, budget, limits)
        except BudgetExceeded as exc:
            failed = exc
            lb_all = max(lb_all, exc.lb)
            ub_all = max(ub_all, exc.ub)
            order = _greedy_order(sub, "min-fill")
            results.append((block, decomposition_from_order(sub, order)))
            continue
        width = max(width, w)
        lb_all = max(lb_all, w)
        ub_all = max(ub_all, w)
        results.append((block, decomposition_from_order(sub, order)))
    td = _glue(adj, results)
    if failed is not None:
        raise BudgetExceeded("exact treewidth search exceeded its limits", lb_all, ub_all, td)
    return width, td


def _blocks(adj: dict) -> list[frozenset]:
    """Vertex sets of biconnected components (isolated vertices included)."""
    g = LabeledGraph(adj, [(u, v) for u in adj for v in adj[u] if u < v])
    out = []
    for comp in g.components():
        if len(comp) == 1:
            out.append(frozenset(comp))
            continue
        sub = g.induced_subgraph(comp)
        from .core import _bcc_edge_ids

        for ids in _bcc_edge_ids(sub):
            out.append(frozenset(x for i in ids for x in sub.edges[i]))
    return out


def _glue(adj: dict, parts: list[tuple[frozenset, TreeDecomposition]]) -> TreeDecomposition:
    """Join per-block decompositions through shared cut vertices."""
    bags: list[frozenset] = []
    tree: list[tuple[int, int]] = []
    offsets = []
    for _, td in parts:
        offsets.append(len(bags))
        bags.extend(td.bags)
        tree.extend((a + offsets[-1], b + offsets[-1]) for a, b in td.tree)
    holder: dict = {}
    placed = [False] * len(parts)
    by_vertex: dict = {}
    for i, (block, _) in enumerate(parts):
        for v in block:
            by_vertex.setdefault(v, []).append(i)
    for start in range(len(parts)):
        if placed[start]:
            continue
        if start > 0:
            tree.append((offsets[start - 1], offsets[start]))  # join components
        queue = deque([start])
        placed[start] = True
        while queue:
            i = queue.popleft()
            block, td = parts[i]
            for k, bag in enumerate(td.bags):
                for v in bag:
                    holder.setdefault(v, offsets[i] + k)
            for v in sorted(block):
                for j in by_vertex[v]:
                    if placed[j]:
                        continue
                    placed[j] = True
                    jb = next(k for k, bag in enumerate(parts[j][1].bags) if v in bag)
                    tree.append((holder[v], offsets[j] + jb))
                    queue.append(j)
    return TreeDecomposition(bags, tree)


def _exact_block(adj: dict, budget: int, limits: _Limits) -> tuple[int, list]:
    n = len(adj)
    verts = sorted(adj)
    if n <= 2:
        return n - 1, verts
    g = LabeledGraph(verts, [(u, v) for u in verts for v in adj[u] if u < v])
    lb = lower_bound_mmd(g)
    best_order = None
    ub = n
    for strategy in ("min-fill", "min-degree"):
        order = _greedy_order(adj, strategy)
        w = decomposition_from_order(adj, order).width
        if w < ub:
            ub, best_order = w, order
    if lb >= ub:
        return ub, best_order
    idx = {v: i for i, v in enumerate(verts)}
    masks = [0] * n
    for v in verts:
        for u in adj[v]:
            masks[idx[v]] |= 1 << idx[u]
    if n <= budget:
        w, order = _kernels.subset_dp(masks, ub)
        if w >= ub:
            return ub, best_order
        return w, [verts[i] for i in order]
    for k in range(lb, ub):
        order = _kernels.decide_treewidth(masks, k, limits.node_limit, limits.deadline, lb)
        if order is None:
            continue
        if order is _kernels.GAVE_UP:
            raise BudgetExceeded("branch and bound gave up", k, ub)
        return k, [verts[i] for i in order]
    return ub, best_order
