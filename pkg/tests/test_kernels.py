import os
import subprocess
import sys

import numpy as np
import pytest

from pcm_threshold import kernels
from pcm_threshold._accel import NUMBA_AVAILABLE
from pcm_threshold.trees import _prufer_bfs_tables, _prufer_bfs_tables_jit, tree_tables

needs_numba = pytest.mark.skipif(not NUMBA_AVAILABLE, reason="numba not installed")


def brute_abs_spread(x):
    T = x.shape[1]
    out = np.zeros((x.shape[0], x.shape[2]))
    for i in range(T):
        for j in range(i + 1, T):
            out += np.abs(x[:, i] - x[:, j])
    return out


def brute_square_spread(x):
    T = x.shape[1]
    out = np.zeros((x.shape[0], x.shape[2]))
    for i in range(T):
        for j in range(i + 1, T):
            out += (x[:, i] - x[:, j]) ** 2
    return out


@pytest.mark.parametrize("T", [1, 2, 3, 16, 125])
def test_spread_kernels_match_brute_force(rng, T):
    x = rng.random((4, T, 3))
    ref = brute_abs_spread(x)
    np.testing.assert_allclose(kernels.abs_spread_numpy(x), ref, rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(kernels.abs_spread_numba(x), ref, rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(kernels.square_spread(x), brute_square_spread(x), rtol=1e-12, atol=1e-12)


@needs_numba
@pytest.mark.parametrize("n", [2, 3, 5, 6])
def test_tree_weight_backends_agree(rng, n):
    child, parent = tree_tables(n)
    mats = np.exp(rng.normal(size=(8, n, n)))
    a = kernels.tree_weights_numpy(mats, child, parent)
    b = kernels.tree_weights_numba(mats, child, parent)
    np.testing.assert_allclose(a, b, rtol=1e-15, atol=0)


@needs_numba
@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_prufer_table_backends_agree(n):
    c1, p1 = _prufer_bfs_tables(n)
    c2, p2 = _prufer_bfs_tables_jit(n)
    assert np.array_equal(c1, c2) and np.array_equal(p1, p2)


def test_env_flag_selects_numpy_backend():
    env = dict(os.environ, PCM_THRESHOLD_DISABLE_NUMBA="1")
    code = "import pcm_threshold.kernels as k; print(k.BACKEND)"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"


def test_numpy_backend_end_to_end_matches():
    # the same worst-case value through both backends
    code = (
        "from pcm_threshold import *\n"
        "r = exhaustive_search(PAPER_WEIGHTS, PerturbationConfig(0.3), Objective.MIN_CONSISTENCY)\n"
        "print(repr(r.best_score))"
    )
    results = []
    for flag in ("1", "0"):
        env = dict(os.environ, PCM_THRESHOLD_DISABLE_NUMBA=flag)
        out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        results.append(float(out.stdout))
    assert results[0] == pytest.approx(results[1], abs=1e-13)
