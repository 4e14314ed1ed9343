"""Hot search kernels over vertex bitmasks.

Each kernel has a numba implementation and a pure numpy/Python fallback.
The numba path is used when numba imports and ``DISPLAYGRAPH_NUMBA`` is not
set to ``0``. Both paths return identical results.
"""

from __future__ import annotations

import os
import time

import numpy as np

USE_NUMBA = os.environ.get("DISPLAYGRAPH_NUMBA", "1").strip().lower() not in ("0", "false", "no", "off")
try:
    if not USE_NUMBA:
        raise ImportError
    from numba import njit
    from numba import types as _nbtypes
    from numba.typed import Dict as _NbDict
except ImportError:  # pragma: no cover - exercised via the env flag
    USE_NUMBA = False

# Largest subset-DP table the numpy fallback will allocate (n * 2**n bytes).
PURE_DP_MAX = 20
NUMBA_MAX_BITS = 63


class _GaveUpType:
    def __repr__(self) -> str:
        return "GAVE_UP"


GAVE_UP = _GaveUpType()


def popcount(x: int) -> int:
    return bin(x).count("1")


def _bits(x: int):
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


# ---------------------------------------------------------------------------
# subset dynamic programming


def _subset_dp_numpy(masks: list[int], ub: int) -> tuple[int, list[int]]:
    n = len(masks)
    size = 1 << n
    subsets = np.arange(size, dtype=np.int64)
    adj = np.asarray(masks, dtype=np.int64)
    q = np.empty((n, size), dtype=np.int8)
    for v in range(n):
        bit = np.int64(1 << v)
        allowed = subsets | bit
        comp = np.full(size, bit, dtype=np.int64)
        while True:
            nb = np.zeros(size, dtype=np.int64)
            for u in range(n):
                nb |= adj[u] * ((comp >> u) & 1)
            grown = comp | (nb & allowed)
            if np.array_equal(grown, comp):
                break
            comp = grown
        q[v] = np.bitwise_count(nb & ~allowed).astype(np.int8)
    tw = np.full(size, 127, dtype=np.int8)
    tw[0] = -1
    level = np.bitwise_count(subsets)
    for k in range(1, n + 1):
        idx = subsets[level == k]
        best = np.full(idx.size, 127, dtype=np.int8)
        for v in range(n):
            has = (idx >> v) & 1 == 1
            sel = idx[has]
            prev = sel ^ (1 << v)
            cand = np.maximum(tw[prev], q[v][prev])
            best[has] = np.minimum(best[has], cand)
        best = np.minimum(best, ub)
        tw[idx] = best
    order = []
    s = size - 1
    while s:
        for v in range(n):
            if s >> v & 1:
                prev = s ^ (1 << v)
                if max(int(tw[prev]), int(q[v][prev])) == int(tw[s]) or (tw[s] == ub and tw[prev] <= ub):
                    order.append(v)
                    s = prev
                    break
    order.reverse()
    return int(tw[size - 1]), order


def _q_size_py(masks, s: int, v: int) -> int:
    allowed = s | (1 << v)
    comp = 1 << v
    frontier = comp
    nb = 0
    while frontier:
        add = 0
        for u in _bits(frontier):
            add |= masks[u]
        nb |= add
        frontier = add & allowed & ~comp
        comp |= frontier
    return popcount(nb & ~allowed)


if USE_NUMBA:

    @njit(cache=True)
    def _q_size_nb(adj, s, v):
        bit = np.uint64(1) << np.uint64(v)
        allowed = s | bit
        comp = bit
        frontier = bit
        nb = np.uint64(0)
        while frontier:
            add = np.uint64(0)
            f = frontier
            while f:
                low = f & (~f + np.uint64(1))
                u = 0
                t = low
                while t > np.uint64(1):
                    t >>= np.uint64(1)
                    u += 1
                add |= adj[u]
                f ^= low
            nb |= add
            frontier = add & allowed & ~comp
            comp |= frontier
        out = nb & ~allowed
        c = 0
        while out:
            out &= out - np.uint64(1)
            c += 1
        return c

    @njit(cache=True)
    def _subset_dp_nb(adj, ub):
        n = adj.shape[0]
        size = 1 << n
        tw = np.empty(size, dtype=np.int8)
        tw[0] = -1
        for s in range(1, size):
            best = ub
            su = np.uint64(s)
            for v in range(n):
                if (s >> v) & 1:
                    prev = s ^ (1 << v)
                    t = tw[prev]
                    if t >= best:
                        continue
                    qv = _q_size_nb(adj, np.uint64(prev), v)
                    val = t if t > qv else qv
                    if val < best:
                        best = val
            tw[s] = best
        order = np.empty(n, dtype=np.int64)
        k = n - 1
        s = size - 1
        while s:
            for v in range(n):
                if (s >> v) & 1:
                    prev = s ^ (1 << v)
                    t = tw[prev]
                    qv = _q_size_nb(adj, np.uint64(prev), v)
                    val = t if t > qv else qv
                    if val == tw[s] or (tw[s] == ub and val >= ub and t <= ub):
                        order[k] = v
                        k -= 1
                        s = prev
                        break
        return tw[size - 1], order


def subset_dp(masks: list[int], ub: int) -> tuple[int, list[int]]:
    """Exact treewidth by DP over vertex subsets, capped at ``ub``.

    Returns ``(width, elimination order)``; a width equal to ``ub`` means
    "no ordering better than ub" and the order is then not meaningful.
    """
    n = len(masks)
    if n == 0:
        return -1, []
    if USE_NUMBA and n <= NUMBA_MAX_BITS:
        w, order = _subset_dp_nb(np.asarray(masks, dtype=np.uint64), np.int8(min(ub, 127)))
        return int(w), [int(x) for x in order]
    if n > PURE_DP_MAX:
        for k in range(0, ub):
            order = _decide_py(masks, k, None, None)
            if order is not None:
                return k, order
        return ub, []
    return _subset_dp_numpy(masks, ub)


# ---------------------------------------------------------------------------
# branch and bound decision: is tw <= k ?


def _elimination_neighbourhoods(masks, s: int, rem: int) -> dict[int, int]:
    """Neighbours of each remaining vertex in the graph with ``s`` eliminated."""
    out = {}
    for v in _bits(rem):
        allowed = s | (1 << v)
        comp = 1 << v
        frontier = comp
        nb = 0
        while frontier:
            add = 0
            for u in _bits(frontier):
                add |= masks[u]
            nb |= add
            frontier = add & allowed & ~comp
            comp |= frontier
        out[v] = nb & ~allowed
    return out


def _mmd_plus(h: dict[int, int]) -> int:
    h = dict(h)
    lb = 0
    while len(h) > 1:
        v = min(h, key=lambda x: (popcount(h[x]), x))
        nb = h.pop(v)
        lb = max(lb, popcount(nb))
        if not nb:
            continue
        u = min(_bits(nb), key=lambda x: (popcount(h[x]), x))
        vb = 1 << v
        ub_ = 1 << u
        for a in _bits(nb):
            h[a] &= ~vb
        for a in _bits(nb & ~ub_):
            h[a] |= ub_
            h[u] |= 1 << a
    return lb


def _is_almost_simplicial(h: dict[int, int], v: int) -> bool:
    """True if all but at most one neighbour of ``v`` are pairwise adjacent."""
    nb = h[v]
    bad = [a for a in _bits(nb) if (nb & ~(1 << a)) & ~h[a]]
    if not bad:
        return True
    for skip in bad:
        rest = nb & ~(1 << skip)
        if all((rest & ~(1 << a)) & ~h[a] == 0 for a in _bits(rest)):
            return True
    return False


def _decide_py(masks, k, node_limit, deadline):
    n = len(masks)
    full = (1 << n) - 1
    failed: set[int] = set()
    nodes = 0

    def search(s: int):
        nonlocal nodes
        rem = full & ~s
        if popcount(rem) <= k + 1:
            return list(_bits(rem))
        if s in failed:
            return None
        nodes += 1
        if node_limit is not None and nodes > node_limit:
            raise _Stop
        if deadline is not None and nodes % 256 == 0 and time.monotonic() > deadline:
            raise _Stop
        h = _elimination_neighbourhoods(masks, s, rem)
        if _mmd_plus(h) > k:
            failed.add(s)
            return None
        forced = None
        for v in sorted(h, key=lambda x: (popcount(h[x]), x)):
            if popcount(h[v]) > k:
                break
            if _is_almost_simplicial(h, v):
                forced = v
                break
        if forced is not None:
            cands = [forced]
        else:
            cands = sorted((v for v in h if popcount(h[v]) <= k), key=lambda x: (popcount(h[x]), x))
        for v in cands:
            sub = search(s | (1 << v))
            if sub is not None:
                return [v] + sub
        failed.add(s)
        return None

    try:
        return search(0)
    except _Stop:
        return GAVE_UP


class _Stop(Exception):
    pass


if USE_NUMBA:

    @njit(cache=True)
    def _popc(x):
        c = 0
        while x:
            x &= x - np.uint64(1)
            c += 1
        return c

    @njit(cache=True)
    def _low_index(x):
        u = 0
        t = x & (~x + np.uint64(1))
        while t > np.uint64(1):
            t >>= np.uint64(1)
            u += 1
        return u

    @njit(cache=True)
    def _nbhd_nb(adj, s, v):
        bit = np.uint64(1) << np.uint64(v)
        allowed = s | bit
        comp = bit
        frontier = bit
        nb = np.uint64(0)
        while frontier:
            add = np.uint64(0)
            f = frontier
            while f:
                add |= adj[_low_index(f)]
                f &= f - np.uint64(1)
            nb |= add
            frontier = add & allowed & ~comp
            comp |= frontier
        return nb & ~allowed

    @njit(cache=True)
    def _mmd_plus_nb(h, rem):
        h = h.copy()
        alive = rem
        lb = 0
        one = np.uint64(1)
        while _popc(alive) > 1:
            v = -1
            dv = 1 << 30
            f = alive
            while f:
                x = _low_index(f)
                f &= f - one
                d = _popc(h[x])
                if d < dv:
                    dv = d
                    v = x
            nb = h[v]
            alive &= ~(one << np.uint64(v))
            if dv > lb:
                lb = dv
            if nb == 0:
                continue
            u = -1
            du = 1 << 30
            f = nb
            while f:
                x = _low_index(f)
                f &= f - one
                d = _popc(h[x])
                if d < du:
                    du = d
                    u = x
            vb = one << np.uint64(v)
            ubit = one << np.uint64(u)
            f = nb
            while f:
                a = _low_index(f)
                f &= f - one
                h[a] &= ~vb
            f = nb & ~ubit
            while f:
                a = _low_index(f)
                f &= f - one
                h[a] |= ubit
                h[u] |= one << np.uint64(a)
        return lb

    @njit(cache=True)
    def _almost_simplicial_nb(h, v):
        one = np.uint64(1)
        nb = h[v]
        bad = np.uint64(0)
        f = nb
        while f:
            a = _low_index(f)
            f &= f - one
            if (nb & ~(one << np.uint64(a))) & ~h[a]:
                bad |= one << np.uint64(a)
        if bad == 0:
            return True
        f = bad
        while f:
            skip = _low_index(f)
            f &= f - one
            rest = nb & ~(one << np.uint64(skip))
            ok = True
            g = rest
            while g:
                a = _low_index(g)
                g &= g - one
                if (rest & ~(one << np.uint64(a))) & ~h[a]:
                    ok = False
                    break
            if ok:
                return True
        return False

    @njit(cache=True)
    def _decide_nb(adj, k, node_limit):
        n = adj.shape[0]
        one = np.uint64(1)
        full = (one << np.uint64(n)) - one
        failed = _NbDict.empty(key_type=_nbtypes.uint64, value_type=_nbtypes.uint8)
        cand = np.empty((n + 1, n), dtype=np.int64)
        ncand = np.zeros(n + 1, dtype=np.int64)
        pos = np.zeros(n + 1, dtype=np.int64)
        state = np.zeros(n + 1, dtype=np.uint64)
        chosen = np.empty(n + 1, dtype=np.int64)
        h = np.zeros(n, dtype=np.uint64)
        deg = np.zeros(n, dtype=np.int64)
        nodes = 0
        depth = 0
        expand = True
        while True:
            if expand:
                s = state[depth]
                rem = full & ~s
                ncand[depth] = 0
                pos[depth] = 0
                if _popc(rem) <= k + 1:
                    order = np.empty(n, dtype=np.int64)
                    for i in range(depth):
                        order[i] = chosen[i]
                    i = depth
                    f = rem
                    while f:
                        order[i] = _low_index(f)
                        f &= f - one
                        i += 1
                    return 1, order
                if s not in failed:
                    nodes += 1
                    if node_limit > 0 and nodes > node_limit:
                        return 2, np.empty(0, dtype=np.int64)
                    f = rem
                    while f:
                        x = _low_index(f)
                        f &= f - one
                        h[x] = _nbhd_nb(adj, s, x)
                        deg[x] = _popc(h[x])
                    if _mmd_plus_nb(h, rem) > k:
                        failed[s] = np.uint8(1)
                    else:
                        forced = -1
                        best = 1 << 30
                        f = rem
                        while f:
                            x = _low_index(f)
                            f &= f - one
                            if deg[x] <= k and deg[x] < best and _almost_simplicial_nb(h, x):
                                best = deg[x]
                                forced = x
                        if forced >= 0:
                            cand[depth, 0] = forced
                            ncand[depth] = 1
                        else:
                            c = 0
                            f = rem
                            while f:
                                x = _low_index(f)
                                f &= f - one
                                if deg[x] <= k:
                                    j = c
                                    while j > 0 and deg[cand[depth, j - 1]] > deg[x]:
                                        cand[depth, j] = cand[depth, j - 1]
                                        j -= 1
                                    cand[depth, j] = x
                                    c += 1
                            ncand[depth] = c
            if pos[depth] < ncand[depth]:
                v = cand[depth, pos[depth]]
                pos[depth] += 1
                chosen[depth] = v
                state[depth + 1] = state[depth] | (one << np.uint64(v))
                depth += 1
                expand = True
            else:
                failed[state[depth]] = np.uint8(1)
                if depth == 0:
                    return 0, np.empty(0, dtype=np.int64)
                depth -= 1
                expand = False


def decide_treewidth(masks, k, node_limit=None, deadline=None, lb=0):
    """Elimination order of width <= k, ``None`` if none exists, or ``GAVE_UP``.

    The numba path honours ``node_limit`` only; ``deadline`` is checked by
    the pure path.
    """
    if USE_NUMBA and len(masks) <= NUMBA_MAX_BITS:
        status, order = _decide_nb(np.asarray(masks, dtype=np.uint64), k, node_limit or 0)
        if status == 1:
            return [int(x) for x in order]
        if status == 2:
            return GAVE_UP
        return None
    return _decide_py(masks, k, node_limit, deadline)
