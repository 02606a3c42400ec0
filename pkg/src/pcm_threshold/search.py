"""Worst-case search over sign patterns at a fixed relative error.

Two engines share one fitness model: exhaustive enumeration of every pattern
(the reference for small ``n``) and a steady-state genetic algorithm.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .aggregate import deviation_pct, geometric_aggregate, normalize_weights, tree_spectra
from .consistency import ConsistencyConfig, consistency_batch
from .errors import ContractError, ResourceError
from .pcm import PerturbationConfig, as_weights, build_perfect_pcm, perturb_batch, validate_patterns
from .trees import DEFAULT_TREE_CAP, tree_count

DEFAULT_ENUMERATION_CAP = 2**20
_BATCH_BUDGET = 2**22  # floats per (P, T, n) spectra chunk


class Objective(str, enum.Enum):
    MAX_DEVIATION = "max-deviation"
    MIN_CONSISTENCY = "min-consistency"

    @property
    def sign(self) -> float:
        """+1 when larger scores are better, -1 otherwise."""
        return 1.0 if self is Objective.MAX_DEVIATION else -1.0


@dataclass(frozen=True)
class GaConfig:
    population_size: int = 50
    mutation_prob: float | None = None  # None -> 1 / pattern length
    stall_limit: int = 1000
    max_evaluations: int = 100_000
    seed: int = 0

    def __post_init__(self):
        if self.population_size < 2:
            raise ContractError("population_size must be at least 2")
        if self.mutation_prob is not None and not 0.0 <= self.mutation_prob <= 1.0:
            raise ContractError("mutation_prob must lie in [0, 1]")
        if self.stall_limit < 1:
            raise ContractError("stall_limit must be at least 1")
        if self.max_evaluations < self.population_size:
            raise ContractError("max_evaluations must cover the initial population")


@dataclass
class SearchResult:
    best_pattern: np.ndarray
    best_score: float
    evaluations: int
    exhaustive: bool
    objective: Objective
    # (evaluation index, incumbent score) at each improvement
    trace: list[tuple[int, float]] = field(default_factory=list)


class FitnessModel:
    """Scores sign patterns applied to the perfect matrix of fixed reference weights."""

    def __init__(self, w, cfg: PerturbationConfig, ccfg: ConsistencyConfig = ConsistencyConfig(),
                 tree_cap: int = DEFAULT_TREE_CAP):
        self.weights = as_weights(w)
        self.n = self.weights.size
        self.cfg = cfg
        self.ccfg = ccfg
        self.tree_cap = tree_cap
        self.base = build_perfect_pcm(self.weights).entries
        self.reference = normalize_weights(self.weights)
        self.length = cfg.pattern_length(self.n)
        # fail early on the tree cap
        tree_spectra(self.base[None], tree_cap)
        self._chunk = max(1, _BATCH_BUDGET // (tree_count(self.n) * self.n))

    def score_batch(self, patterns) -> tuple[np.ndarray, np.ndarray]:
        """Deviation (%) and consistency index for each pattern row."""
        pats = validate_patterns(patterns, self.n, self.cfg)
        dev = np.empty(pats.shape[0])
        cons = np.empty(pats.shape[0])
        for lo in range(0, pats.shape[0], self._chunk):
            hi = lo + self._chunk
            spectra = tree_spectra(perturb_batch(self.base, self.cfg, pats[lo:hi]), self.tree_cap)
            dev[lo:hi] = deviation_pct(geometric_aggregate(spectra), self.reference)
            cons[lo:hi] = consistency_batch(spectra, self.ccfg).min(axis=1)
        return dev, cons

    def score(self, pattern, obj: Objective) -> float:
        dev, cons = self.score_batch(pattern)
        return float(dev[0] if obj is Objective.MAX_DEVIATION else cons[0])


def evaluate_fitness(w, cfg: PerturbationConfig, pattern, obj: Objective,
                     ccfg: ConsistencyConfig = ConsistencyConfig()) -> float:
    """Perturb the perfect matrix of ``w`` by ``pattern`` and score it.

    Returns the deviation of the combinatorial priority vector from the
    normalized reference weights (percent) for ``MAX_DEVIATION``, or the
    overall consistency index for ``MIN_CONSISTENCY``.
    """
    return FitnessModel(w, cfg, ccfg).score(pattern, Objective(obj))


def all_patterns(length: int, alphabet) -> np.ndarray:
    """Every pattern in lexicographic order, shape ``(len(alphabet) ** length, length)``."""
    return np.array(list(itertools.product(alphabet, repeat=length)), dtype=np.int8).reshape(-1, length)


def _check_enumeration(model: FitnessModel, cap: int):
    size = len(model.cfg.mode.alphabet) ** model.length
    if size > cap:
        raise ResourceError(
            f"exhaustive search over {size:,} patterns exceeds the enumeration cap {cap:,}"
        )


def exhaustive_scores(model: FitnessModel, cap: int = DEFAULT_ENUMERATION_CAP):
    """All patterns with both scores; shared by both objectives in a sweep."""
    _check_enumeration(model, cap)
    pats = all_patterns(model.length, model.cfg.mode.alphabet)
    dev, cons = model.score_batch(pats)
    return pats, dev, cons


def best_of(pats, scores, obj: Objective) -> SearchResult:
    # argmax/argmin return the first optimum: lexicographically smallest pattern
    k = int(np.argmax(scores) if obj is Objective.MAX_DEVIATION else np.argmin(scores))
    return SearchResult(pats[k].copy(), float(scores[k]), len(scores), True, obj)


def exhaustive_search(w, cfg: PerturbationConfig, obj: Objective,
                      ccfg: ConsistencyConfig = ConsistencyConfig(),
                      cap: int = DEFAULT_ENUMERATION_CAP, model: FitnessModel | None = None) -> SearchResult:
    obj = Objective(obj)
    model = model or FitnessModel(w, cfg, ccfg)
    pats, dev, cons = exhaustive_scores(model, cap)
    return best_of(pats, dev if obj is Objective.MAX_DEVIATION else cons, obj)


def ga_search(w, cfg: PerturbationConfig, obj: Objective,
              ccfg: ConsistencyConfig = ConsistencyConfig(), ga: GaConfig = GaConfig(),
              model: FitnessModel | None = None) -> SearchResult:
    """Steady-state genetic search for the worst pattern.

    Each step draws two distinct parents uniformly, cuts them at a uniform
    point in ``[1, L-1]``, mutates every gene with probability
    ``mutation_prob`` to one of the other symbols, and lets the child replace
    the least fit member only if it is strictly fitter. The run stops after
    ``stall_limit`` consecutive children that fail to improve the incumbent,
    or at ``max_evaluations``.
    """
    obj = Objective(obj)
    model = model or FitnessModel(w, cfg, ccfg)
    L = model.length
    alphabet = np.array(cfg.mode.alphabet, dtype=np.int8)
    k = alphabet.size
    p_mut = 1.0 / L if ga.mutation_prob is None else ga.mutation_prob
    rng = np.random.default_rng(ga.seed)
    sign = obj.sign
    memo: dict[bytes, float] = {}

    def fitness(genome: np.ndarray) -> float:
        key = genome.tobytes()
        f = memo.get(key)
        if f is None:
            f = sign * model.score(genome, obj)
            memo[key] = f
        return f

    # genes are stored as alphabet indices so mutation is modular arithmetic
    pop_idx = rng.integers(0, k, size=(ga.population_size, L), dtype=np.int8)
    pop = alphabet[pop_idx]
    fit = np.array([fitness(g) for g in pop])
    evaluations = ga.population_size
    b = int(np.argmax(fit))
    best_fit, best_genome = fit[b], pop[b].copy()
    trace = [(evaluations, sign * best_fit)]

    stall = 0
    while stall < ga.stall_limit and evaluations < ga.max_evaluations:
        i, j = rng.choice(ga.population_size, size=2, replace=False)
        if L > 1:
            cut = int(rng.integers(1, L))
            child_idx = np.concatenate((pop_idx[i, :cut], pop_idx[j, cut:]))
        else:
            child_idx = pop_idx[i].copy()
        mask = rng.random(L) < p_mut
        if mask.any():
            shift = rng.integers(1, k, size=int(mask.sum()), dtype=np.int8)
            child_idx[mask] = (child_idx[mask] + shift) % k
        child = alphabet[child_idx]
        f = fitness(child)
        evaluations += 1

        worst = int(np.argmin(fit))
        if f > fit[worst]:
            pop_idx[worst] = child_idx
            pop[worst] = child
            fit[worst] = f
        if f > best_fit:
            best_fit, best_genome = f, child.copy()
            trace.append((evaluations, sign * best_fit))
            stall = 0
        else:
            stall += 1

    return SearchResult(best_genome, float(sign * best_fit), evaluations, False, obj, trace)


def search_space_size(n: int, cfg: PerturbationConfig) -> int:
    return int(math.pow(len(cfg.mode.alphabet), cfg.pattern_length(n)))
