"""Spanning trees of the complete comparison graph and per-tree priority vectors.

Nodes are 0-based (alternative ``i`` is node ``i``). Trees are enumerated
through Prüfer sequences in lexicographic order, so tree ``t`` of ``K_n``
corresponds to the base-``n`` digits of ``t``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import kernels
from ._accel import USE_NUMBA, njit
from .errors import ContractError, DomainError, ResourceError
from .pcm import Pcm

DEFAULT_TREE_CAP = 8


@dataclass(frozen=True)
class SpanningTree:
    n: int
    edges: tuple[tuple[int, int], ...]  # sorted pairs (a, b) with a < b

    def __post_init__(self):
        edges = tuple(sorted((min(a, b), max(a, b)) for a, b in self.edges))
        object.__setattr__(self, "edges", edges)
        if len(edges) != self.n - 1 or not _is_spanning_tree(self.n, edges):
            raise ContractError(f"edges {edges} do not form a spanning tree on {self.n} nodes")

    def bfs_order(self, root: int = 0) -> tuple[np.ndarray, np.ndarray]:
        """(child, parent) arrays such that each parent precedes its children."""
        adj = [[] for _ in range(self.n)]
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        child, parent = [], []
        seen = {root}
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for v in sorted(adj[u]):
                if v not in seen:
                    seen.add(v)
                    child.append(v)
                    parent.append(u)
                    queue.append(v)
        return np.array(child, dtype=np.int64), np.array(parent, dtype=np.int64)


def _is_spanning_tree(n, edges):
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in edges:
        if not (0 <= a < n and 0 <= b < n):
            return False
        ra, rb = find(a), find(b)
        if ra == rb:
            return False
        parent[ra] = rb
    return True


def tree_count(n: int) -> int:
    """Cayley's formula ``n ** (n - 2)``."""
    return n ** (n - 2) if n >= 2 else 1


def decode_prufer(n: int, seq) -> SpanningTree:
    """The labelled tree on nodes ``0..n-1`` encoded by a Prüfer sequence."""
    if n < 2:
        raise DomainError(f"n must be at least 2, got {n}")
    seq = [int(a) for a in seq]
    if len(seq) != n - 2:
        raise ContractError(f"Prüfer sequence for n={n} must have length {n - 2}, got {len(seq)}")
    if any(a < 0 or a >= n for a in seq):
        raise DomainError(f"Prüfer labels must lie in 0..{n - 1}, got {seq}")
    degree = [1] * n
    for a in seq:
        degree[a] += 1
    edges = []
    for a in seq:
        leaf = degree.index(1)
        edges.append((leaf, a))
        degree[leaf] -= 1
        degree[a] -= 1
    u, v = (i for i, d in enumerate(degree) if d == 1)
    edges.append((u, v))
    return SpanningTree(n, tuple(edges))


def _prufer_bfs_tables(n):
    # BFS (child, parent) order from root 0 for every Prüfer sequence, lexicographic
    T = 1
    for _ in range(n - 2):
        T *= n
    child = np.empty((T, n - 1), dtype=np.int64)
    parent = np.empty((T, n - 1), dtype=np.int64)
    seq = np.zeros(max(n - 2, 1), dtype=np.int64)
    degree = np.empty(n, dtype=np.int64)
    adj = np.zeros((n, n), dtype=np.bool_)
    seen = np.empty(n, dtype=np.bool_)
    queue = np.empty(n, dtype=np.int64)
    for t in range(T):
        rem = t
        for k in range(n - 3, -1, -1):
            seq[k] = rem % n
            rem //= n
        degree[:] = 1
        for k in range(n - 2):
            degree[seq[k]] += 1
        adj[:, :] = False
        for k in range(n - 2):
            a = seq[k]
            leaf = 0
            while degree[leaf] != 1:
                leaf += 1
            adj[leaf, a] = True
            adj[a, leaf] = True
            degree[leaf] -= 1
            degree[a] -= 1
        u = -1
        for i in range(n):
            if degree[i] == 1:
                if u < 0:
                    u = i
                else:
                    adj[u, i] = True
                    adj[i, u] = True
                    break
        seen[:] = False
        seen[0] = True
        queue[0] = 0
        head, tail, k = 0, 1, 0
        while head < tail:
            x = queue[head]
            head += 1
            for y in range(n):
                if adj[x, y] and not seen[y]:
                    seen[y] = True
                    child[t, k] = y
                    parent[t, k] = x
                    k += 1
                    queue[tail] = y
                    tail += 1
    return child, parent


_prufer_bfs_tables_jit = njit(_prufer_bfs_tables)


def _check_cap(n: int, cap: int):
    if n < 2:
        raise DomainError(f"n must be at least 2, got {n}")
    if n > cap:
        raise ResourceError(
            f"n={n} exceeds the spanning-tree cap {cap}: K_n has n^(n-2) = {tree_count(n):,} "
            "spanning trees and the count grows super-exponentially"
        )


@lru_cache(maxsize=None)
def _tree_tables(n: int) -> tuple[np.ndarray, np.ndarray]:
    build = _prufer_bfs_tables_jit if USE_NUMBA else _prufer_bfs_tables
    child, parent = build(n)
    child.setflags(write=False)
    parent.setflags(write=False)
    return child, parent


def tree_tables(n: int, cap: int = DEFAULT_TREE_CAP) -> tuple[np.ndarray, np.ndarray]:
    """Cached ``(child, parent)`` BFS tables, shape ``(n**(n-2), n-1)``, rooted at node 0."""
    _check_cap(n, cap)
    return _tree_tables(n)


def enumerate_spanning_trees(n: int, cap: int = DEFAULT_TREE_CAP) -> list[SpanningTree]:
    child, parent = tree_tables(n, cap)
    return [SpanningTree(n, tuple(zip(c.tolist(), p.tolist()))) for c, p in zip(child, parent)]


def tree_priority_vector(pcm: Pcm, tree: SpanningTree, root: int = 0) -> np.ndarray:
    """Propagate ratios outward from ``root`` along the tree, then normalize.

    Crossing an edge from a known node ``u`` to a new node ``v`` sets
    ``weight[v] = m[v, u] * weight[u]``. For reciprocal matrices the result
    does not depend on ``root``.
    """
    if tree.n != pcm.n:
        raise ContractError(f"tree has {tree.n} nodes but the PCM has {pcm.n} alternatives")
    child, parent = tree.bfs_order(root)
    out = kernels.tree_weights(pcm.entries[None], child[None], parent[None], root)
    return out[0, 0]
