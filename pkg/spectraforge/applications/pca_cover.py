"""
Constraint sets for PCA from overlapping interval observations.

A covariance operator P on L^2([0, 1]) is observed only through its
restrictions to subintervals I_1..I_r of a connected cover. With orthonormal
Legendre functions e_jk on I_j extended by zero (e~_jk), the data are
Tr P = beta_0 and <e~_jk, P e~_jl> = beta_jkl. Everything is expressed in a
piecewise Legendre basis over the partition cut out by the interval endpoints,
in which each e~_jk is represented exactly.
"""

import math
from dataclasses import dataclass
from typing import Any, Dict, List, Mapping, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial import legendre
from pydantic import BaseModel, Field

from spectraforge.applications.galerkin import GalerkinBasis
from spectraforge.core.extremality import bp_rank_bound
from spectraforge.core.linalg import as_hermitian, trace_inner
from spectraforge.core.models import ScalarField
from spectraforge.core.spectrahedron import Spectrahedron, custom
from spectraforge.exceptions import ShapeError, ValidationError
from spectraforge.logger import get_logger
from spectraforge.utils.validators import validate_intervals

logger = get_logger(__name__)

MomentKey = Union[str, Tuple[int, int, int]]


@dataclass(frozen=True)
class IntervalCover:
    """Subintervals of [0, 1], sorted by left endpoint, with consecutive overlaps."""

    intervals: Tuple[Tuple[float, float], ...]

    @classmethod
    def from_intervals(cls, intervals: Sequence[Sequence[float]]) -> "IntervalCover":
        """
        Raises:
            ValidationError: If the intervals do not form a connected cover of [0, 1]
        """
        pairs = tuple((float(a), float(b)) for a, b in intervals)
        validate_intervals(pairs)
        return cls(intervals=pairs)

    def __len__(self) -> int:
        return len(self.intervals)

    @property
    def breakpoints(self) -> List[float]:
        points = {0.0, 1.0}
        for a, b in self.intervals:
            points.update((a, b))
        return sorted(points)


class RankBoundSummary(BaseModel):
    """Rank bounds for extreme points of the cover's constraint set."""

    intervals: int = Field(..., ge=1)
    p: int = Field(..., ge=1)
    unsymmetrized_count: int = Field(..., description="r p^2 constraint pairs (k, l), trace excluded")
    closed_form_bound: float = Field(..., description="sqrt(2 r p^2 + 9/4) - 1/2")
    closed_form_rank: int = Field(..., description="floor of the closed-form bound")
    constraint_count: int = Field(..., description="r p (p + 1) / 2 + 1 distinct constraints")
    count_rank_bound: int = Field(..., description="Extreme-point rank bound from the distinct count")


def cover_basis(cover: IntervalCover, p: int) -> GalerkinBasis:
    """Piecewise Legendre basis with p functions per cell of the cover's partition."""
    return GalerkinBasis.piecewise_legendre(cover.breakpoints, p)


def restricted_functions(cover: IntervalCover, p: int) -> np.ndarray:
    """
    Basis coefficients of e~_jk, shape (r, p, m).

    Computed by quadrature on the partition cells, which is exact since each
    e~_jk is a polynomial of degree < p on every cell.
    """
    basis = cover_basis(cover, p)
    nodes, weights = basis.quadrature(p + 1)
    phi = basis.evaluate(nodes) * weights[:, None]
    scale = np.sqrt(2.0 * np.arange(p) + 1.0)

    coefficients = np.zeros((len(cover), p, basis.size))
    for j, (a, b) in enumerate(cover.intervals):
        h = b - a
        inside = (nodes > a) & (nodes < b)
        values = np.zeros((nodes.shape[0], p))
        t = 2.0 * (nodes[inside] - a) / h - 1.0
        values[inside] = legendre.legvander(t, p - 1) * scale / np.sqrt(h)
        coefficients[j] = values.T @ phi
    return coefficients


def _moment_pairs(cover: IntervalCover, p: int) -> List[Tuple[int, int, int]]:
    return [(j, k, l) for j in range(len(cover)) for k in range(p) for l in range(k, p)]


def moment_key(j: int, k: int, l: int) -> str:
    """Document key of beta_jkl (0-based indices)."""
    return f"{j},{k},{l}"


def _lookup(moments: Mapping[MomentKey, float], j: int, k: int, l: int) -> Any:
    for key in (moment_key(j, k, l), moment_key(j, l, k), (j, k, l), (j, l, k)):
        if key in moments:
            return moments[key]
    return None


def pca_cover_constraints(
    cover: Union[IntervalCover, Sequence[Sequence[float]]],
    p: int,
    trace_target: float,
    moments: Mapping[MomentKey, float]
) -> Spectrahedron:
    """
    The constraint set {(I, beta_0)} plus (sym(e~_jk e~_jl^T), beta_jkl) for k <= l.

    Args:
        cover: Interval cover of [0, 1]
        p: Legendre functions per interval
        trace_target: beta_0
        moments: beta_jkl keyed "j,k,l" or (j, k, l), 0-based; (j, l, k) is accepted for k < l

    Returns:
        Spectrahedron: 1 + r p (p + 1) / 2 real constraints in the cover basis

    Raises:
        ValidationError: If a moment is missing
    """
    if not isinstance(cover, IntervalCover):
        cover = IntervalCover.from_intervals(cover)
    if p < 1:
        raise ValidationError(f"Need at least one function per interval, got {p}")

    missing = [moment_key(*index) for index in _moment_pairs(cover, p) if _lookup(moments, *index) is None]
    if missing:
        raise ValidationError(f"Moment map is incomplete; missing {', '.join(missing)}")

    coefficients = restricted_functions(cover, p)
    m = coefficients.shape[2]
    constraints: List[Tuple[Any, float, str]] = [(np.eye(m), float(trace_target), "trace")]
    for j, k, l in _moment_pairs(cover, p):
        outer = np.outer(coefficients[j, k], coefficients[j, l])
        constraints.append(
            ((outer + outer.T) / 2.0, float(_lookup(moments, j, k, l)), f"moment_{j}_{k}_{l}")
        )

    spectrahedron = custom(constraints, ScalarField.REAL)
    logger.debug(
        f"PCA cover constraint set: {len(spectrahedron)} constraints in dimension {m}",
        extra={"intervals": len(cover), "p": p}
    )
    return spectrahedron


def moments_from_covariance(
    cover: Union[IntervalCover, Sequence[Sequence[float]]],
    p: int,
    covariance: Any
) -> Tuple[float, Dict[str, float]]:
    """
    Trace and restricted moments of a covariance in cover-basis coordinates.

    Raises:
        ShapeError: If the covariance does not match the cover basis size
    """
    if not isinstance(cover, IntervalCover):
        cover = IntervalCover.from_intervals(cover)
    coefficients = restricted_functions(cover, p)
    matrix = as_hermitian(covariance, ScalarField.REAL)
    if matrix.n != coefficients.shape[2]:
        raise ShapeError(f"Covariance has dimension {matrix.n}, cover basis has {coefficients.shape[2]}")

    moments = {}
    for j, k, l in _moment_pairs(cover, p):
        outer = np.outer(coefficients[j, k], coefficients[j, l])
        moments[moment_key(j, k, l)] = trace_inner((outer + outer.T) / 2.0, matrix)
    return float(np.trace(matrix.data)), moments


def rank_bound_summary(cover: Union[IntervalCover, Sequence[Sequence[float]]], p: int) -> RankBoundSummary:
    """Both the closed-form rank bound and the bound from the distinct constraint count."""
    r = len(cover)
    unsymmetrized = r * p * p
    closed_form = math.sqrt(2.0 * unsymmetrized + 9.0 / 4.0) - 0.5
    count = r * p * (p + 1) // 2 + 1
    return RankBoundSummary(
        intervals=r,
        p=p,
        unsymmetrized_count=unsymmetrized,
        closed_form_bound=closed_form,
        closed_form_rank=int(math.floor(closed_form + 1e-12)),
        constraint_count=count,
        count_rank_bound=bp_rank_bound(count, ScalarField.REAL)
    )
