"""Spectral modularity detection and the detectability transition of the
two-community stochastic block model."""

from .detect import Partition, detectability, partition_by_kmeans2, partition_by_sign
from .eigen import EigenResult, SolverConfig, leading_eigenpair, leading_singular_value
from .estimator import EmpiricalEstimates, estimate
from .graph import DegreeData, EmptyGraphError, Graph, build_graph, cut_counts, degree_data
from .modularity import ModularityOperator, community_view, dense_modularity, restricted_quadform
from .sbm import SbmParams, SbmSample, generate, generate_cross_block
from .transition import (
    SweepRecord,
    TheoryPoint,
    eigvec_entry_limits,
    run_sweep,
    subcritical_lambda_over_n,
    theoretical_threshold,
)

__version__ = "0.1.0"

__all__ = [
    "DegreeData",
    "EigenResult",
    "EmpiricalEstimates",
    "EmptyGraphError",
    "Graph",
    "ModularityOperator",
    "Partition",
    "SbmParams",
    "SbmSample",
    "SolverConfig",
    "SweepRecord",
    "TheoryPoint",
    "build_graph",
    "community_view",
    "cut_counts",
    "degree_data",
    "dense_modularity",
    "detectability",
    "eigvec_entry_limits",
    "estimate",
    "generate",
    "generate_cross_block",
    "leading_eigenpair",
    "leading_singular_value",
    "partition_by_kmeans2",
    "partition_by_sign",
    "restricted_quadform",
    "run_sweep",
    "subcritical_lambda_over_n",
    "theoretical_threshold",
]
