"""The numba kernels and their pure fallbacks must agree exactly."""

import os
import random
import subprocess
import sys

import pytest

from displaygraph import _kernels as K
from displaygraph.treewidth import decomposition_from_order


def _masks(rng, n, p):
    masks = [0] * n
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                masks[i] |= 1 << j
                masks[j] |= 1 << i
    return masks


def _width(masks, order):
    adj = {i: {j for j in range(len(masks)) if masks[i] >> j & 1} for i in range(len(masks))}
    return decomposition_from_order(adj, order).width


def _corpus(count, lo, hi, seed):
    rng = random.Random(seed)
    return [_masks(rng, rng.randint(lo, hi), rng.uniform(0.2, 0.6)) for _ in range(count)]


def test_numpy_dp_against_decision_search():
    for masks in _corpus(25, 2, 12, 1):
        w, order = K._subset_dp_numpy(masks, len(masks))
        assert _width(masks, order) == w
        assert K._decide_py(masks, w, None, None) is not None
        if w > 0:
            assert K._decide_py(masks, w - 1, None, None) is None


needs_numba = pytest.mark.skipif(not K.USE_NUMBA, reason="numba path disabled")


@needs_numba
def test_subset_dp_paths_agree():
    import numpy as np

    for masks in _corpus(30, 2, 14, 2):
        a = K._subset_dp_numpy(masks, len(masks))
        w, order = K._subset_dp_nb(np.asarray(masks, dtype=np.uint64), np.int8(len(masks)))
        assert int(w) == a[0]
        assert _width(masks, [int(x) for x in order]) == a[0]


@needs_numba
def test_decision_paths_return_identical_orders():
    import numpy as np

    for masks in _corpus(40, 5, 22, 3):
        w, _ = K._subset_dp_numpy(masks, len(masks)) if len(masks) <= 14 else (None, None)
        for k in range(0, 6):
            py = K._decide_py(masks, k, None, None)
            status, order = K._decide_nb(np.asarray(masks, dtype=np.uint64), k, 0)
            nb = [int(x) for x in order] if status == 1 else None
            assert py == nb
            if w is not None:
                assert (py is not None) == (k >= w)


@needs_numba
def test_node_limit_gives_up_in_both_paths():
    import numpy as np

    rng = random.Random(5)
    masks = _masks(rng, 30, 0.3)
    gave_up = 0
    for k in range(4, 16):
        py = K._decide_py(masks, k, 3, None)
        status, _ = K._decide_nb(np.asarray(masks, dtype=np.uint64), k, 3)
        assert (py is K.GAVE_UP) == (status == 2)
        gave_up += status == 2
    assert gave_up


def test_env_flag_selects_pure_path():
    code = "from displaygraph import _kernels as K; print(K.USE_NUMBA)"
    env = dict(os.environ, DISPLAYGRAPH_NUMBA="0")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "False"


def test_pure_mode_exact_treewidth_matches():
    code = (
        "import networkx as nx\n"
        "from displaygraph.core import LabeledGraph\n"
        "from displaygraph.treewidth import exact_treewidth\n"
        "G = nx.convert_node_labels_to_integers(nx.petersen_graph())\n"
        "print(exact_treewidth(LabeledGraph(G.nodes, G.edges))[0])\n"
    )
    env = dict(os.environ, DISPLAYGRAPH_NUMBA="0")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "4"
