"""Consistency thresholds for pairwise comparison matrices.

Calibrates, by worst-case search over perturbed perfectly consistent
matrices, the consistency index a matrix must reach for its aggregated
weights to stay within a required deviation of the truth, and gates
matrices against that threshold.
"""

from .aggregate import combinatorial_aggregate, normalize_weights, relative_deviation, row_geometric_mean
from .consistency import (
    ConsistencyConfig,
    ConsistencyReport,
    alternative_spectrum,
    pcm_consistency,
    spectrum_consistency,
)
from .errors import (
    ContractError,
    DegenerateFitError,
    DomainError,
    FormatError,
    PcmError,
    RangeError,
    ResourceError,
)
from .kernels import BACKEND
from .pcm import (
    Mode,
    Pcm,
    PerturbationConfig,
    apply_sign_perturbation,
    as_weights,
    build_perfect_pcm,
    check_reciprocity,
)
from .pipeline import (
    PAPER_WEIGHTS,
    Algorithm,
    GateVerdict,
    SweepCurve,
    SweepPoint,
    ThresholdTable,
    TrendFit,
    build_threshold_table,
    fit_linear_trend,
    gate_decision,
    interpolate_threshold,
    run_sweep,
)
from .search import GaConfig, Objective, SearchResult, evaluate_fitness, exhaustive_search, ga_search
from .trees import SpanningTree, decode_prufer, enumerate_spanning_trees, tree_priority_vector

__version__ = "0.1.0"
