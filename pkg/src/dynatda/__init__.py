"""Stable invariants of dynamic metric spaces and interleaving-based lower bounds."""

from .complexes import (
    BoundaryMatrix,
    SimplicialComplexSlice,
    betti,
    boundary_matrix,
    connected_components,
    rank_of_inclusion,
    rips_slice,
)
from .diagrams import PersistenceDiagram
from .distances import (
    ComparisonReport,
    InterleavingResult,
    bottleneck,
    compare_betti0,
    compare_rank,
    erosion,
    interleaving,
    k_test,
    rank_interleaving,
    rank_k_test,
)
from .dms_core import (
    DMSError,
    IntervalMinIndex,
    SampledDMS,
    TimeGrid,
    discretize,
    estimate_lipschitz,
    interval_min,
    load_dms,
    make_example,
)
from .invariants import (
    INF,
    Axis,
    ConfigError,
    GridFunction,
    RankInvariantGrid,
    SpatioTemporalDendrogram,
    betti0_grid,
    classify_r6,
    crocker,
    rank_invariant_grid,
    slhc,
    static_betti0,
    static_rank,
)
from .oracles import (
    Correspondence,
    SizeCapError,
    ddyn_bruteforce,
    ddyn_multiplicative,
    dyn_distortion,
    dyn_gh,
    gh_bruteforce,
    weak_lp_gh,
)

__version__ = "0.1.0"
