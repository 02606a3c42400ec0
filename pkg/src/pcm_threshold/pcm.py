"""Perfectly consistent comparison matrices and their sign perturbations."""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ContractError, DomainError

RECIPROCITY_TOL = 1e-12
SCALE_RATIO_LIMIT = 9.0


class ScaleWarning(UserWarning):
    """Weights span more than one order of magnitude on the 1..9 scale."""


class Mode(str, enum.Enum):
    """Gene alphabet of a sign pattern."""

    PM = "pm"  # {-1, +1}
    PMZ = "pmz"  # {-1, 0, +1}

    @property
    def alphabet(self) -> tuple[int, ...]:
        # sorted, so exhaustive enumeration order is lexicographic
        return (-1, 1) if self is Mode.PM else (-1, 0, 1)


def as_weights(values) -> np.ndarray:
    """Validate reference weights and return them as a read-only float array.

    Raises :class:`DomainError` for nonpositive values and emits a
    :class:`ScaleWarning` when ``max / min > 9``.
    """
    w = np.array(values, dtype=float).ravel()
    if w.size < 2:
        raise DomainError(f"need at least 2 weights, got {w.size}")
    if not np.all(np.isfinite(w)) or np.any(w <= 0):
        raise DomainError(f"weights must be finite and positive, got {w.tolist()}")
    if w.max() / w.min() > SCALE_RATIO_LIMIT:
        warnings.warn(
            f"weights span a ratio of {w.max() / w.min():.3g} > {SCALE_RATIO_LIMIT:g}; "
            "they are not of the same order of magnitude",
            ScaleWarning,
            stacklevel=2,
        )
    w.setflags(write=False)
    return w


@dataclass(frozen=True, eq=False)
class Pcm:
    """An ``n x n`` positive pairwise comparison matrix with unit diagonal."""

    entries: np.ndarray

    def __post_init__(self):
        m = np.array(self.entries, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ContractError(f"PCM must be square, got shape {m.shape}")
        if m.shape[0] < 2:
            raise ContractError("PCM needs at least 2 alternatives")
        if not np.all(np.isfinite(m)) or np.any(m <= 0):
            raise DomainError("PCM entries must be finite and positive")
        if not np.all(np.diag(m) == 1.0):
            raise DomainError("PCM diagonal must be exactly 1")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def reciprocal(self) -> bool:
        return check_reciprocity(self)

    def permuted(self, order) -> Pcm:
        """The same comparisons with alternatives relabelled so that new ``i`` is old ``order[i]``."""
        order = np.asarray(order)
        return Pcm(self.entries[np.ix_(order, order)])

    def __eq__(self, other):
        if not isinstance(other, Pcm):
            return NotImplemented
        return np.array_equal(self.entries, other.entries)

    __hash__ = None


@dataclass(frozen=True)
class PerturbationConfig:
    delta: float = 0.0
    mode: Mode = Mode.PM
    half_matrix: bool = True

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        if not (0.0 <= self.delta < 1.0):
            raise DomainError(f"delta must lie in [0, 1), got {self.delta}")

    def pattern_length(self, n: int) -> int:
        return gene_count(n, self.half_matrix)

    def with_delta(self, delta: float) -> PerturbationConfig:
        return PerturbationConfig(delta, self.mode, self.half_matrix)


def gene_count(n: int, half_matrix: bool) -> int:
    return n * (n - 1) // 2 if half_matrix else n * (n - 1)


@lru_cache(maxsize=None)
def gene_layout(n: int, half_matrix: bool) -> tuple[np.ndarray, np.ndarray]:
    """Row and column of the entry governed by each gene (row-major)."""
    if half_matrix:
        rows, cols = np.triu_indices(n, 1)
    else:
        rows, cols = np.nonzero(~np.eye(n, dtype=bool))
    rows.setflags(write=False)
    cols.setflags(write=False)
    return rows, cols


def build_perfect_pcm(w) -> Pcm:
    """The perfectly consistent matrix ``m_ij = w_i / w_j``."""
    w = as_weights(w)
    return Pcm(w[:, None] / w[None, :])


def check_reciprocity(pcm: Pcm | np.ndarray, tol: float = RECIPROCITY_TOL) -> bool:
    m = pcm.entries if isinstance(pcm, Pcm) else np.asarray(pcm)
    return bool(np.all(np.abs(m * m.T - 1.0) <= tol))


def validate_patterns(patterns, n: int, cfg: PerturbationConfig) -> np.ndarray:
    """Coerce to a ``(P, L)`` int8 array and check length and alphabet."""
    pats = np.asarray(patterns, dtype=np.int8)
    if pats.ndim == 1:
        pats = pats[None, :]
    L = cfg.pattern_length(n)
    if pats.ndim != 2 or pats.shape[1] != L:
        raise ContractError(
            f"sign pattern length {pats.shape[-1]} does not match layout length {L} "
            f"(n={n}, half_matrix={cfg.half_matrix})"
        )
    if not np.all(np.isin(pats, cfg.mode.alphabet)):
        raise ContractError(f"sign pattern contains genes outside {cfg.mode.alphabet}")
    return pats


def perturb_batch(base: np.ndarray, cfg: PerturbationConfig, patterns: np.ndarray) -> np.ndarray:
    """Apply ``P`` validated patterns to one base matrix; returns ``(P, n, n)``.

    Entries whose gene is 0 (or all entries when ``delta == 0``) keep their
    original value bit for bit, including mirrored reciprocals.
    """
    n = base.shape[0]
    rows, cols = gene_layout(n, cfg.half_matrix)
    factors = 1.0 + patterns.astype(float) * cfg.delta
    mats = np.broadcast_to(base, (patterns.shape[0], n, n)).copy()
    upper = base[rows, cols] * factors
    mats[:, rows, cols] = upper
    if cfg.half_matrix:
        mats[:, cols, rows] = np.where(factors == 1.0, base[cols, rows], 1.0 / upper)
    return mats


def apply_sign_perturbation(pcm: Pcm, cfg: PerturbationConfig, pattern) -> Pcm:
    """Multiply each governed entry by ``1 + g * delta`` for its gene ``g``.

    In half-matrix mode only the upper triangle is governed and the lower
    triangle receives the reciprocals, so the result stays reciprocal. In
    full-matrix mode every off-diagonal entry has its own gene.
    """
    if cfg.half_matrix and not check_reciprocity(pcm):
        raise ContractError("half-matrix perturbation requires a reciprocal PCM")
    pats = validate_patterns(pattern, pcm.n, cfg)
    if pats.shape[0] != 1:
        raise ContractError("apply_sign_perturbation takes a single pattern")
    return Pcm(perturb_batch(pcm.entries, cfg, pats)[0])
