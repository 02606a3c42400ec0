"""Spectral consistency index over spanning-tree estimate spectra.

For one alternative the spectrum is the multiset of its normalized weights,
one per spanning tree. Its index is

    I_a = 1 - sum_{i<j} f(|x_i - x_j|) / M

where ``M`` is the largest value the numerator can take, so ``I_a = 1`` for a
spectrum of identical estimates and ``I_a = 0`` for the most spread one. The
index of a matrix is the minimum over its alternatives.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .aggregate import tree_spectra
from .errors import ContractError
from .pcm import Pcm
from .trees import DEFAULT_TREE_CAP

DISTANCES = ("identity", "square")
NORMALIZERS = ("pair_extremes",)


@dataclass(frozen=True)
class ConsistencyConfig:
    """Strategy tags for the distance ``f`` and the normalizer ``M``.

    ``pair_extremes`` takes ``M = floor(T/2) * ceil(T/2) * f(1)``: the
    numerator is maximized by splitting the ``T`` estimates between the two
    ends of the unit interval, for both supported distances.
    """

    distance: str = "identity"
    normalizer: str = "pair_extremes"

    def __post_init__(self):
        if self.distance not in DISTANCES:
            raise ContractError(f"unknown distance {self.distance!r}; choose from {DISTANCES}")
        if self.normalizer not in NORMALIZERS:
            raise ContractError(f"unknown normalizer {self.normalizer!r}; choose from {NORMALIZERS}")

    @property
    def tag(self) -> str:
        return f"{self.distance}/{self.normalizer}"

    @classmethod
    def from_tag(cls, tag: str) -> ConsistencyConfig:
        distance, _, normalizer = tag.strip().partition("/")
        return cls(distance, normalizer or "pair_extremes")

    def max_numerator(self, T: int) -> float:
        # f(1) == 1 for every supported distance
        return float((T // 2) * ((T + 1) // 2))


@dataclass(frozen=True)
class ConsistencyReport:
    overall: float
    per_alternative: tuple[float, ...]
    argmin: int  # 0-based index of the weakest alternative


def spread_sums(spectra: np.ndarray, cfg: ConsistencyConfig) -> np.ndarray:
    """Numerator of the index for every alternative: ``(P, T, n) -> (P, n)``."""
    if cfg.distance == "identity":
        return kernels.abs_spread(spectra)
    return kernels.square_spread(spectra)


def consistency_batch(spectra: np.ndarray, cfg: ConsistencyConfig) -> np.ndarray:
    """Per-alternative indices for a batch of spectra, shape ``(P, n)``."""
    P, T, n = spectra.shape
    if T < 2:
        return np.ones((P, n))
    return 1.0 - spread_sums(spectra, cfg) / cfg.max_numerator(T)


def alternative_spectrum(pcm: Pcm, alt: int, cap: int = DEFAULT_TREE_CAP) -> np.ndarray:
    """Weight estimates of alternative ``alt`` (0-based), one per tree in enumeration order."""
    if not 0 <= alt < pcm.n:
        raise ContractError(f"alternative index {alt} out of range 0..{pcm.n - 1}")
    return tree_spectra(pcm.entries[None], cap)[0, :, alt]


def spectrum_consistency(spectrum, cfg: ConsistencyConfig = ConsistencyConfig()) -> float:
    s = np.asarray(spectrum, dtype=float).ravel()
    if s.size == 0:
        raise ContractError("empty spectrum")
    return float(consistency_batch(s[None, :, None], cfg)[0, 0])


def report_from_indices(per_alt: np.ndarray) -> ConsistencyReport:
    k = int(np.argmin(per_alt))
    return ConsistencyReport(float(per_alt[k]), tuple(float(x) for x in per_alt), k)


def pcm_consistency(pcm: Pcm, cfg: ConsistencyConfig = ConsistencyConfig(), cap: int = DEFAULT_TREE_CAP) -> ConsistencyReport:
    per_alt = consistency_batch(tree_spectra(pcm.entries[None], cap), cfg)[0]
    return report_from_indices(per_alt)
