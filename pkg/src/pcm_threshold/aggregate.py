"""Combinatorial aggregation over all spanning trees, and the deviation metric."""

from __future__ import annotations

import numpy as np

from . import kernels
from .errors import ContractError, DomainError
from .pcm import Pcm
from .trees import DEFAULT_TREE_CAP, tree_tables

MAX_DEVIATION_PCT = 200.0


def normalize_weights(values) -> np.ndarray:
    v = np.array(values, dtype=float).ravel()
    if v.size == 0 or not np.all(np.isfinite(v)) or np.any(v <= 0):
        raise DomainError(f"weights to normalize must be positive, got {v.tolist()}")
    return v / v.sum()


def tree_spectra(mats: np.ndarray, cap: int = DEFAULT_TREE_CAP) -> np.ndarray:
    """Per-tree normalized priority vectors for a ``(P, n, n)`` batch -> ``(P, T, n)``."""
    child, parent = tree_tables(mats.shape[1], cap)
    return kernels.tree_weights(mats, child, parent, 0)


def geometric_aggregate(spectra: np.ndarray) -> np.ndarray:
    """Elementwise geometric mean across trees (axis 1), renormalized; ``(P, T, n) -> (P, n)``."""
    logs = np.log(spectra).mean(axis=1)
    logs -= logs.max(axis=1, keepdims=True)
    g = np.exp(logs)
    return g / g.sum(axis=1, keepdims=True)


def combinatorial_aggregate(pcm: Pcm, cap: int = DEFAULT_TREE_CAP) -> np.ndarray:
    """Priority vector of the combinatorial method.

    One priority vector is derived per spanning tree of the complete
    comparison graph (``n ** (n - 2)`` of them) and the vectors are combined
    component by component with the geometric mean.
    """
    return geometric_aggregate(tree_spectra(pcm.entries[None], cap))[0]


def row_geometric_mean(pcm: Pcm) -> np.ndarray:
    """Normalized row geometric means; for reciprocal matrices this equals the combinatorial result."""
    g = np.exp(np.log(pcm.entries).mean(axis=1))
    return g / g.sum()


def deviation_pct(v: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """``100 * sum |v - reference|`` along the last axis (batched)."""
    return 100.0 * np.abs(v - reference).sum(axis=-1)


def relative_deviation(v, reference) -> float:
    """Total absolute deviation of a unit-sum vector from the reference, in percent.

    Both vectors sum to 1, so the result lies in ``[0, 200]``.
    """
    v = np.asarray(v, dtype=float)
    reference = np.asarray(reference, dtype=float)
    if v.shape != reference.shape:
        raise ContractError(f"length mismatch: {v.shape} vs {reference.shape}")
    return float(deviation_pct(v, reference))
