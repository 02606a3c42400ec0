"""Hot numeric kernels with numba and pure-numpy implementations.

Both implementations of each kernel have identical signatures and are kept
importable so tests and the benchmark can compare them directly. The public
names (:func:`tree_weights`, :func:`abs_spread`) dispatch according to
:data:`pcm_threshold._accel.USE_NUMBA`.

Array layout used throughout:

* ``mats``   -- ``(P, n, n)`` batch of comparison matrices
* ``child``, ``parent`` -- ``(T, n - 1)`` BFS edge order of each spanning tree;
  step ``k`` of tree ``t`` assigns node ``child[t, k]`` from the already known
  node ``parent[t, k]``
* spectra   -- ``(P, T, n)`` normalized per-tree weights
"""

import numpy as np

from ._accel import USE_NUMBA, njit


def tree_weights_numpy(mats, child, parent, root=0):
    P, n, _ = mats.shape
    T = child.shape[0]
    raw = np.empty((P, T, n))
    raw[:, :, root] = 1.0
    rows = np.arange(T)
    for k in range(n - 1):
        c = child[:, k]
        p = parent[:, k]
        raw[:, rows, c] = mats[:, c, p] * raw[:, rows, p]
    raw /= raw.sum(axis=2, keepdims=True)
    return raw


@njit
def _tree_weights_jit(mats, child, parent, root):
    P, n, _ = mats.shape
    T = child.shape[0]
    out = np.empty((P, T, n))
    for q in range(P):
        for t in range(T):
            out[q, t, root] = 1.0
            for k in range(n - 1):
                c = child[t, k]
                p = parent[t, k]
                out[q, t, c] = mats[q, c, p] * out[q, t, p]
            s = 0.0
            for i in range(n):
                s += out[q, t, i]
            for i in range(n):
                out[q, t, i] /= s
    return out


def tree_weights_numba(mats, child, parent, root=0):
    return _tree_weights_jit(
        np.ascontiguousarray(mats, dtype=np.float64),
        np.ascontiguousarray(child, dtype=np.int64),
        np.ascontiguousarray(parent, dtype=np.int64),
        int(root),
    )


def abs_spread_numpy(spectra):
    """Sum of ``|x_i - x_j|`` over unordered pairs along axis 1."""
    T = spectra.shape[1]
    s = np.sort(spectra, axis=1)
    coef = 2.0 * np.arange(T) - (T - 1)
    return (s * coef[None, :, None]).sum(axis=1)


@njit
def _weighted_rank_sum_jit(s):
    # s sorted along axis 1
    P, T, n = s.shape
    out = np.zeros((P, n))
    for q in range(P):
        for t in range(T):
            c = 2.0 * t - (T - 1)
            for a in range(n):
                out[q, a] += c * s[q, t, a]
    return out


def abs_spread_numba(spectra):
    # numpy's vectorized sort beats numba's by ~10x; only the reduction is jitted
    return _weighted_rank_sum_jit(np.sort(np.asarray(spectra, dtype=np.float64), axis=1))


def square_spread(spectra):
    """Sum of ``(x_i - x_j)**2`` over unordered pairs along axis 1.

    Uses the identity ``sum_{i<j} (x_i - x_j)^2 = T * sum_i (x_i - mean)^2``.
    """
    T = spectra.shape[1]
    centered = spectra - spectra.mean(axis=1, keepdims=True)
    return T * (centered * centered).sum(axis=1)


if USE_NUMBA:
    tree_weights = tree_weights_numba
    abs_spread = abs_spread_numba
else:
    tree_weights = tree_weights_numpy
    abs_spread = abs_spread_numpy

BACKEND = "numba" if USE_NUMBA else "numpy"
