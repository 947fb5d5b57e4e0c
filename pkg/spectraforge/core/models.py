"""Report models shared across the core modules and the CLI."""

from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field


class ScalarField(str, Enum):
    """Scalar field of the ambient Hilbert space."""
    REAL = "real"
    COMPLEX = "complex"


class RankDecision(BaseModel):
    """Numerical rank together with the spectrum and threshold it was decided on."""

    rank: int = Field(..., ge=0, description="Count of singular values above the threshold")
    singular_values: List[float] = Field(default_factory=list, description="Descending singular values")
    threshold_used: float = Field(..., ge=0.0, description="Threshold singular values must exceed")


class MembershipReport(BaseModel):
    """Feasibility of a point for a spectrahedron."""

    psd_violation: float = Field(..., ge=0.0, description="Most negative eigenvalue, clamped at 0")
    constraint_residuals: List[float] = Field(default_factory=list, description="|Tr(A_k P) - c_k|")
    scales: List[float] = Field(default_factory=list, description="max(1, |c_k|, ||A_k||_2)")
    labels: List[Optional[str]] = Field(default_factory=list, description="Constraint labels")
    max_scaled_residual: float = Field(0.0, ge=0.0, description="max_k residual_k / scale_k")
    feasible: bool = Field(..., description="PSD and all constraints within tolerance")
    tol: float = Field(..., gt=0.0, description="Tolerance the decision was made at")


class ExtremalityReport(BaseModel):
    """
    Outcome of the rank-based extremality test.

    ``dim_X`` is r(r+1)/2 over the reals and r^2 over the complex numbers,
    r being the numerical rank of the point.
    """

    field: ScalarField
    n: int = Field(..., ge=1, description="Ambient dimension")
    n_constraints: int = Field(..., ge=0)
    rank_P: int = Field(..., ge=0)
    gram_rank: int = Field(..., ge=0)
    dim_X: int = Field(..., ge=0)
    is_extreme: bool
    facial_dimension: int = Field(..., ge=0)
    rank_threshold: float = Field(..., ge=0.0, description="Threshold used for rank P")
    gram_threshold: float = Field(..., ge=0.0, description="Threshold used for the Gram rank")
    method: str = Field("gram", description="'gram' or the specialized 'hadamard' path")
    tol: float = Field(..., gt=0.0, description="Feasibility tolerance of the precondition")


class HadamardInequalityReport(BaseModel):
    """Hadamard rank inequality rank(A o A) <= (rank A)^2 and its equality case."""

    rank_A: int = Field(..., ge=0)
    lhs_rank: int = Field(..., ge=0, description="rank of the Gram-matching Hadamard square")
    plain_square_rank: int = Field(..., ge=0, description="rank of the non-conjugated A o A")
    rhs_bound: int = Field(..., ge=0, description="(rank A)^2")
    real_bound: Optional[int] = Field(None, description="rank A (rank A + 1) / 2 for real inputs")
    bound_holds: bool
    real_bound_holds: Optional[bool] = None
    equality: bool
    extreme_in_diagonal_spectrahedron: bool
    extremality: ExtremalityReport


class RunManifest(BaseModel):
    """Everything needed to reproduce a CLI report."""

    command: str
    inputs: Dict[str, Optional[str]] = Field(default_factory=dict, description="Input paths")
    tolerances: Dict[str, Any] = Field(default_factory=dict)
    seeds: Dict[str, Optional[int]] = Field(default_factory=dict)
    version: str
    duration_seconds: float = Field(0.0, ge=0.0)
