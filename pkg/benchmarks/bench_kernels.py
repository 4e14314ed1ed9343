"""Time the numba kernels against their pure fallbacks.

    python benchmarks/bench_kernels.py [--repeat 3] [--seed 1]

Both paths run in one process on the same random graphs; results are
checked for equality before timing is reported. JIT compilation is done
in a warm-up call and excluded.
"""

import argparse
import random
import statistics
import time

import numpy as np

from displaygraph import _kernels as K


def random_masks(rng, n, p):
    masks = [0] * n
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                masks[i] |= 1 << j
                masks[j] |= 1 << i
    return masks


def timed(fn, repeat):
    runs = []
    out = None
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn()
        runs.append(time.perf_counter() - start)
    return out, statistics.median(runs)


def bench_subset_dp(rng, repeat):
    rows = []
    for n in (12, 14, 16, 18):
        masks = random_masks(rng, n, 0.35)
        arr = np.asarray(masks, dtype=np.uint64)
        pure, t_pure = timed(lambda: K._subset_dp_numpy(masks, n), repeat)
        fast, t_fast = timed(lambda: K._subset_dp_nb(arr, np.int8(n)), repeat)
        assert int(fast[0]) == pure[0]
        rows.append(("subset-dp", n, pure[0], t_pure, t_fast))
    return rows


def bench_decide(rng, repeat):
    rows = []
    for n in (20, 26, 32):
        masks = random_masks(rng, n, 0.3)
        arr = np.asarray(masks, dtype=np.uint64)
        width = None
        for k in range(n):
            if K._decide_py(masks, k, None, None) is not None:
                width = k
                break
        k = width - 1
        pure, t_pure = timed(lambda: K._decide_py(masks, k, None, None), repeat)
        fast, t_fast = timed(lambda: K._decide_nb(arr, k, 0), repeat)
        assert (pure is None) == (int(fast[0]) == 0)
        rows.append(("decide tw-1", n, width, t_pure, t_fast))
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()
    if not K.USE_NUMBA:
        raise SystemExit("numba path disabled (DISPLAYGRAPH_NUMBA=0 or numba missing)")
    rng = random.Random(args.seed)
    warm = random_masks(rng, 8, 0.5)
    K._subset_dp_nb(np.asarray(warm, dtype=np.uint64), np.int8(8))
    K._decide_nb(np.asarray(warm, dtype=np.uint64), 3, 0)
    rows = bench_subset_dp(rng, args.repeat) + bench_decide(rng, args.repeat)
    print(f"{'kernel':<12} {'n':>3} {'tw':>3} {'pure s':>9} {'numba s':>9} {'speedup':>8}")
    for name, n, w, tp, tf in rows:
        print(f"{name:<12} {n:>3} {w:>3} {tp:>9.4f} {tf:>9.4f} {tp / max(tf, 1e-9):>7.1f}x")


if __name__ == "__main__":
    main()
