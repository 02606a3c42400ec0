"""Calibration sweep, threshold table, linear trend and the aggregation gate."""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field

import numpy as np

from .aggregate import combinatorial_aggregate
from .consistency import ConsistencyConfig, pcm_consistency
from .errors import ContractError, DegenerateFitError, RangeError
from .pcm import Mode, Pcm, PerturbationConfig, as_weights
from .search import (
    DEFAULT_ENUMERATION_CAP,
    FitnessModel,
    GaConfig,
    Objective,
    best_of,
    exhaustive_scores,
    ga_search,
)

PAPER_WEIGHTS = (1.0, 3**0.5, 3.0, 3 * 3**0.5, 9.0)

DEFAULT_REQUIREMENTS = tuple(float(x) for x in range(10, 55, 5))

# Published reference values, kept for side-by-side reports only.
PAPER_TABLE = {10.0: 0.94, 15.0: 0.90, 20.0: 0.87, 25.0: 0.86, 30.0: 0.84,
               35.0: 0.82, 40.0: 0.80, 45.0: 0.78, 50.0: 0.76}
PAPER_FLOOR = 0.95
PAPER_TREND = (-0.3801, 96.533)


def default_grid(start: float = 0.0, stop: float = 0.5, step: float = 0.025) -> list[float]:
    count = int(round((stop - start) / step))
    return [round(start + k * step, 12) for k in range(count + 1)]


class Algorithm(str, enum.Enum):
    GA = "ga"
    EXHAUSTIVE = "exhaustive"


@dataclass(frozen=True)
class SweepPoint:
    delta: float
    delta_max_pct: float
    i_min: float


@dataclass
class SweepCurve:
    points: list[SweepPoint]
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        deltas = [p.delta for p in self.points]
        if any(b <= a for a, b in zip(deltas, deltas[1:])):
            raise ContractError("sweep deltas must be strictly increasing")

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        a = np.array([(p.delta, p.delta_max_pct, p.i_min) for p in self.points], dtype=float).reshape(-1, 3)
        return a[:, 0], a[:, 1], a[:, 2]


def run_sweep(w, grid=None, mode: Mode = Mode.PM, half_matrix: bool = True,
              algo: Algorithm = Algorithm.EXHAUSTIVE,
              ccfg: ConsistencyConfig = ConsistencyConfig(), ga: GaConfig = GaConfig(),
              enumeration_cap: int = DEFAULT_ENUMERATION_CAP) -> SweepCurve:
    """Worst-case deviation and consistency at each relative error of ``grid``."""
    w = as_weights(w)
    grid = default_grid() if grid is None else [float(d) for d in grid]
    algo = Algorithm(algo)
    points = []
    for delta in grid:
        cfg = PerturbationConfig(delta, mode, half_matrix)
        model = FitnessModel(w, cfg, ccfg)
        if algo is Algorithm.EXHAUSTIVE:
            pats, dev, cons = exhaustive_scores(model, enumeration_cap)
            worst_dev = best_of(pats, dev, Objective.MAX_DEVIATION).best_score
            worst_cons = best_of(pats, cons, Objective.MIN_CONSISTENCY).best_score
        else:
            worst_dev = ga_search(w, cfg, Objective.MAX_DEVIATION, ccfg, ga, model=model).best_score
            worst_cons = ga_search(w, cfg, Objective.MIN_CONSISTENCY, ccfg, ga, model=model).best_score
        points.append(SweepPoint(delta, worst_dev, worst_cons))
    provenance = {
        "weights": [float(x) for x in w],
        "mode": Mode(mode).value,
        "half_matrix": bool(half_matrix),
        "algo": algo.value,
        "consistency": ccfg.tag,
    }
    if algo is Algorithm.GA:
        provenance["ga"] = {"population_size": ga.population_size, "mutation_prob": ga.mutation_prob,
                            "stall_limit": ga.stall_limit, "max_evaluations": ga.max_evaluations,
                            "seed": ga.seed}
    return SweepCurve(points, provenance)


@dataclass(frozen=True)
class ThresholdRow:
    delta_requirement_pct: float
    threshold: float
    clamped: bool = False  # requirement outside the calibrated deviation range


@dataclass
class ThresholdTable:
    rows: list[ThresholdRow]
    floor_threshold: float
    consistency: ConsistencyConfig = ConsistencyConfig()

    def __post_init__(self):
        if not self.rows:
            raise ContractError("threshold table has no rows")
        self.rows = sorted(self.rows, key=lambda r: r.delta_requirement_pct)

    @property
    def requirements(self) -> np.ndarray:
        return np.array([r.delta_requirement_pct for r in self.rows])

    @property
    def thresholds(self) -> np.ndarray:
        return np.array([r.threshold for r in self.rows])


def paper_table() -> ThresholdTable:
    """The published thresholds, tagged with the default index configuration."""
    rows = [ThresholdRow(d, t) for d, t in PAPER_TABLE.items()]
    return ThresholdTable(rows, PAPER_FLOOR, ConsistencyConfig())


def _invert_deviation(deltas, dev, target):
    """Smallest relative error at which the worst deviation reaches ``target`` (linear pieces)."""
    for k in range(len(deltas) - 1):
        lo, hi = dev[k], dev[k + 1]
        if lo <= target <= hi:
            if hi == lo:
                return deltas[k]
            return deltas[k] + (target - lo) / (hi - lo) * (deltas[k + 1] - deltas[k])
    raise RangeError(f"deviation {target}% is not bracketed by the curve")


def build_threshold_table(curve: SweepCurve, requirements=DEFAULT_REQUIREMENTS,
                          floor_requirement_pct: float | None = None) -> ThresholdTable:
    """Pair curve points through their shared relative error.

    For each required deviation the relative error that produces it is found
    on the deviation curve, and the consistency curve is read at that error.
    Requirements beyond the largest calibrated deviation take the last
    point's index and are flagged ``clamped``; those below the first
    calibrated deviation take the floor. The floor itself is the threshold
    at ``floor_requirement_pct`` (default: half the smallest requirement).
    """
    if not curve.points:
        raise ContractError("cannot build a threshold table from an empty curve")
    deltas, dev, imin = curve.arrays()
    if len(deltas) < 2 or dev.max() <= dev.min():
        raise RangeError("curve has no deviation range to interpolate over")
    if np.any(np.diff(dev) < -1e-9):
        warnings.warn("deviation curve is not monotone; using the first crossing", RuntimeWarning, stacklevel=2)
    reqs = sorted(float(r) for r in requirements)
    if floor_requirement_pct is None:
        floor_requirement_pct = reqs[0] / 2.0

    def lookup(target):
        if target > dev.max():
            return float(imin[np.argmax(dev)]), True
        if target < dev[0]:
            return float(imin[0]), True
        d = _invert_deviation(deltas, dev, target)
        return float(np.interp(d, deltas, imin)), False

    rows = [ThresholdRow(r, *lookup(r)) for r in reqs]
    floor, _ = lookup(floor_requirement_pct)
    return ThresholdTable(rows, floor, ConsistencyConfig.from_tag(curve.provenance.get("consistency", "identity")))


def interpolate_threshold(table: ThresholdTable, delta_requirement_pct: float) -> float:
    x = float(delta_requirement_pct)
    req, thr = table.requirements, table.thresholds
    if x < req[0]:
        return float(table.floor_threshold)
    if x >= req[-1]:
        return float(thr[-1])
    k = int(np.searchsorted(req, x, side="right")) - 1
    if x == req[k]:
        return float(thr[k])
    t = (x - req[k]) / (req[k + 1] - req[k])
    return float(thr[k] + t * (thr[k + 1] - thr[k]))


@dataclass(frozen=True)
class TrendFit:
    slope: float
    intercept: float
    residual_rms: float

    def __call__(self, delta_pct):
        return self.slope * np.asarray(delta_pct) + self.intercept


def fit_linear_trend(points) -> TrendFit:
    """Ordinary least squares line through ``(deviation %, index %)`` points."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    x, y = pts[:, 0], pts[:, 1]
    if len(x) < 2 or np.all(x == x[0]):
        raise DegenerateFitError("need at least two distinct deviation values for a linear fit")
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return TrendFit(float(slope), float(intercept), float(np.sqrt(np.mean(resid**2))))


def table_trend_points(table: ThresholdTable) -> np.ndarray:
    return np.column_stack([table.requirements, 100.0 * table.thresholds])


def curve_trend_points(curve: SweepCurve) -> np.ndarray:
    _, dev, imin = curve.arrays()
    return np.column_stack([dev, 100.0 * imin])


@dataclass(frozen=True)
class GateVerdict:
    index: float
    threshold: float
    accept: bool
    weakest_alternative: int  # 0-based
    per_alternative: tuple[float, ...]
    aggregated: np.ndarray | None = None


def gate_decision(pcm: Pcm, delta_requirement_pct: float, table: ThresholdTable,
                  ccfg: ConsistencyConfig = ConsistencyConfig()) -> GateVerdict:
    """Accept the matrix for aggregation iff its index reaches the threshold for the required deviation."""
    if table.consistency != ccfg:
        raise ContractError(
            f"threshold table was calibrated with index {table.consistency.tag}, "
            f"but gating was requested with {ccfg.tag}"
        )
    report = pcm_consistency(pcm, ccfg)
    threshold = interpolate_threshold(table, delta_requirement_pct)
    accept = report.overall >= threshold
    aggregated = combinatorial_aggregate(pcm) if accept else None
    return GateVerdict(report.overall, threshold, accept, report.argmin, report.per_alternative, aggregated)


def correlation(curve: SweepCurve) -> float:
    """Pearson correlation between worst deviation and worst inconsistency ``1 - I``."""
    _, dev, imin = curve.arrays()
    return float(np.corrcoef(dev, 1.0 - imin)[0, 1])
