"""Galerkin-discretized constraint sets and rank-bounded solvers."""

from .galerkin import GalerkinBasis, galerkin_moment_operators
from .lowrank import SolveResult, SolverOptions, max_lambda1_lowrank
from .pca_cover import IntervalCover, pca_cover_constraints, rank_bound_summary
from .quantum import EntropyResult, min_entropy_rank2

__all__ = [
    "GalerkinBasis",
    "galerkin_moment_operators",
    "IntervalCover",
    "pca_cover_constraints",
    "rank_bound_summary",
    "SolverOptions",
    "SolveResult",
    "max_lambda1_lowrank",
    "EntropyResult",
    "min_entropy_rank2",
]
