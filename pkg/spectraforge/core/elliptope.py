"""
Correlation matrices and the elliptope.

The elliptope is the spectrahedron of PSD matrices with unit diagonal. Its
perturbation Gram matrix is the Hadamard square of the point itself, which
gives a direct extremality test, and, for the spectrahedron {P >= 0 : P_jj = A_jj},
the rank inequality rank(A o A) <= (rank A)^2 with equality exactly at extreme points.

Over the complex field Tr(P e_i e_i* P e_j e_j*) = P_ij P_ji = |P_ij|^2, so the
Gram-matching square is A o conj(A). The plain square A o A is kept as the
default of ``hadamard_square`` and reported alongside.
"""

from dataclasses import dataclass
from typing import Any, Optional, Union

import numpy as np
import scipy.linalg

from spectraforge.config import settings
from spectraforge.core.extremality import bp_rank_bound, dim_x, extremality_rank_test
from spectraforge.core.linalg import (
    HermitianMatrix,
    RangeFactor,
    as_hermitian,
    default_rank_threshold,
    min_eigenvalue,
    operator_norm,
    range_factor,
)
from spectraforge.core.models import (
    ExtremalityReport,
    HadamardInequalityReport,
    RankDecision,
    ScalarField,
)
from spectraforge.core.spectrahedron import diagonal_constrained, elliptope, membership
from spectraforge.exceptions import DomainError, NotPSDError, PreconditionError, ValidationError
from spectraforge.logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class CorrelationMatrix:
    """A PSD Hermitian matrix whose diagonal entries are exactly 1."""

    matrix: HermitianMatrix

    @classmethod
    def from_matrix(cls, matrix: Any, tol: Optional[float] = None) -> "CorrelationMatrix":
        """
        Validate a correlation matrix and snap its diagonal to exactly 1.

        Raises:
            PreconditionError: If the matrix is not in the elliptope within ``tol``
            DomainError: If an off-diagonal entry exceeds 1 + tol in modulus
        """
        if isinstance(matrix, CorrelationMatrix):
            return matrix
        tol = settings.feasibility_tol if tol is None else tol
        p = as_hermitian(matrix)
        report = membership(elliptope(p.n, p.field), p, tol)
        if not report.feasible:
            raise PreconditionError(
                f"Not a correlation matrix (psd_violation={report.psd_violation:.3e}, "
                f"max diagonal deviation={report.max_scaled_residual:.3e}, tol={tol:.1e})",
                report
            )

        data = np.array(p.data)
        np.fill_diagonal(data, 1.0)
        off = np.abs(data - np.diag(np.diag(data)))
        if off.size and float(off.max()) > 1.0 + tol:
            raise DomainError(
                f"Off-diagonal entry of modulus {float(off.max()):.6f} exceeds 1 + {tol:.1e}"
            )
        return cls(HermitianMatrix.from_array(data, p.field, check=False))

    @property
    def n(self) -> int:
        return self.matrix.n

    @property
    def field(self) -> ScalarField:
        return self.matrix.field

    @property
    def data(self) -> np.ndarray:
        return self.matrix.data


def hadamard_square(matrix: Any, conjugate: bool = False) -> np.ndarray:
    """
    Entrywise square A o A, or A o conj(A) when ``conjugate`` is set.

    Works on any square array; the two agree over the reals.
    """
    if isinstance(matrix, (HermitianMatrix, CorrelationMatrix)):
        a = matrix.data
    else:
        a = np.asarray(matrix)
    if conjugate:
        return np.real(a * np.conj(a))
    return a * a


def _hadamard_gram_rank(factor: RangeFactor, n: int, tol: Optional[float]) -> RankDecision:
    """
    Rank of A o conj(A) read from its factor.

    With z_i the rows of F diag(sqrt(lambda)), A o conj(A) = K K* where row i of
    K is z_i (x) conj(z_i). Squared singular values of K are the eigenvalues of
    the Hadamard square.
    """
    z = factor.eigenvectors * np.sqrt(factor.eigenvalues)
    r = factor.rank
    sigma = np.zeros(n)
    if r:
        k = np.einsum("ia,ib->iab", z, np.conj(z)).reshape(n, r * r)
        s = scipy.linalg.svdvals(k)
        count = min(n, s.shape[0])
        sigma[:count] = s[:count] ** 2
    sigma = np.sort(sigma)[::-1]
    threshold = default_rank_threshold(sigma, n) if tol is None else float(tol)
    return RankDecision(
        rank=int(np.count_nonzero(sigma > threshold)),
        singular_values=[float(v) for v in sigma],
        threshold_used=threshold
    )


def elliptope_extreme_test(
    point: Any,
    field: Optional[Union[ScalarField, str]] = None,
    tol: Optional[float] = None,
    rank_tol: Optional[float] = None,
    gram_tol: Optional[float] = None
) -> ExtremalityReport:
    """
    Extremality of a correlation matrix from the rank of its Hadamard square.

    P is extreme in the elliptope iff rank(P o conj P) equals r(r+1)/2 (real
    field) or r^2 (complex field), r = rank P.

    Args:
        point: Correlation matrix
        field: Field the elliptope is taken over (defaults to the point's)
        tol: Feasibility tolerance for the correlation check
        rank_tol: Rank threshold for P
        gram_tol: Rank threshold for the Hadamard square

    Returns:
        ExtremalityReport: Same verdict as the general rank test, ``method="hadamard"``

    Raises:
        PreconditionError: If the point is not a correlation matrix
    """
    tol = settings.feasibility_tol if tol is None else tol
    p = point.matrix if isinstance(point, CorrelationMatrix) else as_hermitian(point)
    if field is not None:
        p = p.as_field(field)
    correlation = CorrelationMatrix.from_matrix(p, tol)

    factor = range_factor(correlation.matrix, rank_tol)
    decision = _hadamard_gram_rank(factor, correlation.n, gram_tol)
    dimension = dim_x(factor.rank, correlation.field)
    report = ExtremalityReport(
        field=correlation.field,
        n=correlation.n,
        n_constraints=correlation.n,
        rank_P=factor.rank,
        gram_rank=decision.rank,
        dim_X=dimension,
        is_extreme=decision.rank == dimension,
        facial_dimension=dimension - decision.rank,
        rank_threshold=factor.threshold,
        gram_threshold=decision.threshold_used,
        method="hadamard",
        tol=tol
    )
    logger.debug(
        f"Elliptope test: rank_P={report.rank_P}, hadamard_rank={report.gram_rank}, dim_X={dimension}"
    )
    return report


@dataclass(frozen=True)
class CorrelationNormalization:
    """P = B A B with B_jj = 1/sqrt(A_jj) on the support of the diagonal, 0 elsewhere."""

    correlation: HermitianMatrix
    scaling: np.ndarray
    tol_diag: float

    def __iter__(self):
        yield self.correlation
        yield self.scaling


def normalize_to_correlation(
    matrix: Any,
    tol: Optional[float] = None
) -> CorrelationNormalization:
    """
    Rescale a PSD matrix to correlation form.

    Diagonal entries at or below ``tol_diag = diag_zero_factor * max_j A_jj``
    count as zero; their rows and columns of P are zero.

    Raises:
        NotPSDError: If A is not PSD within ``tol``
    """
    tol = settings.feasibility_tol if tol is None else tol
    a = as_hermitian(matrix)
    smallest = min_eigenvalue(a)
    if smallest < -tol * max(1.0, operator_norm(a)):
        raise NotPSDError(
            f"Cannot normalize a matrix that is not PSD (min eigenvalue {smallest:.6e})",
            smallest
        )

    diagonal = np.real(np.diag(a.data))
    tol_diag = settings.diag_zero_factor * float(max(diagonal.max(), 0.0))
    support = diagonal > tol_diag
    b = np.zeros_like(diagonal)
    b[support] = 1.0 / np.sqrt(diagonal[support])

    p = (a.data * b[:, None]) * b[None, :]
    kept = np.flatnonzero(support)
    p[kept, kept] = 1.0
    logger.debug(
        f"Normalized to correlation form, {int(np.count_nonzero(~support))} zero diagonal entries",
        extra={"tol_diag": tol_diag}
    )
    return CorrelationNormalization(
        correlation=HermitianMatrix.from_array(p, a.field, check=False),
        scaling=np.diag(b),
        tol_diag=tol_diag
    )


def _plain_square_rank(a: HermitianMatrix) -> int:
    s = scipy.linalg.svdvals(hadamard_square(a))
    threshold = default_rank_threshold(s, a.n)
    return int(np.count_nonzero(s > threshold))


def hadamard_inequality_check(
    matrix: Any,
    field: Optional[Union[ScalarField, str]] = None,
    tol: Optional[float] = None,
    rank_tol: Optional[float] = None,
    gram_tol: Optional[float] = None
) -> HadamardInequalityReport:
    """
    Check rank(A o conj A) <= (rank A)^2 and decide the equality case.

    Real matrices are read inside the complex matrices, so extremality is
    decided over the complex spectrahedron {P >= 0 : P_jj = A_jj}. For real
    inputs the sharper bound r(r+1)/2 is recorded as well.

    Raises:
        NotPSDError: If A is not PSD within ``tol``
    """
    tol = settings.feasibility_tol if tol is None else tol
    a = as_hermitian(matrix)
    if field is not None:
        a = a.as_field(field)
    smallest = min_eigenvalue(a)
    if smallest < -tol * max(1.0, operator_norm(a)):
        raise NotPSDError(f"Matrix is not PSD (min eigenvalue {smallest:.6e})", smallest)

    is_real = a.field is ScalarField.REAL
    complex_a = a.as_field(ScalarField.COMPLEX)
    factor = range_factor(complex_a, rank_tol)
    r = factor.rank
    lhs = _hadamard_gram_rank(factor, a.n, gram_tol).rank

    diagonal = np.real(np.diag(a.data))
    extremality = extremality_rank_test(
        complex_a,
        diagonal_constrained(diagonal, ScalarField.COMPLEX),
        tol=tol,
        rank_tol=rank_tol,
        gram_tol=gram_tol
    )

    real_bound = r * (r + 1) // 2 if is_real else None
    report = HadamardInequalityReport(
        rank_A=r,
        lhs_rank=lhs,
        plain_square_rank=_plain_square_rank(a),
        rhs_bound=r * r,
        real_bound=real_bound,
        bound_holds=lhs <= r * r,
        real_bound_holds=(lhs <= real_bound) if real_bound is not None else None,
        equality=lhs == r * r,
        extreme_in_diagonal_spectrahedron=extremality.is_extreme,
        extremality=extremality
    )
    if report.equality != report.extreme_in_diagonal_spectrahedron:
        logger.warning(
            "Hadamard equality flag disagrees with the rank test",
            extra={"lhs_rank": lhs, "gram_rank": extremality.gram_rank, "rank_A": r}
        )
    return report


def random_correlation(
    n: int,
    rank: int,
    field: Union[ScalarField, str] = ScalarField.REAL,
    seed: Optional[int] = None
) -> CorrelationMatrix:
    """
    Sample P = V V* with V an n x rank matrix of Gaussian rows scaled to unit length.

    Raises:
        ValidationError: If rank is outside 1..n
    """
    if n < 1 or not 1 <= rank <= n:
        raise ValidationError(f"Rank must lie in 1..{n}, got {rank}")
    field = ScalarField(field)
    rng = np.random.default_rng(settings.default_seed if seed is None else seed)
    v = rng.standard_normal((n, rank))
    if field is ScalarField.COMPLEX:
        v = v + 1j * rng.standard_normal((n, rank))
    v = v / np.linalg.norm(v, axis=1, keepdims=True)
    p = v @ v.conj().T
    np.fill_diagonal(p, 1.0)
    return CorrelationMatrix(HermitianMatrix.from_array(p, field, check=False))


def max_extreme_rank(n: int, field: Union[ScalarField, str] = ScalarField.REAL) -> int:
    """Largest rank of an extreme point of the n x n elliptope."""
    return bp_rank_bound(n, field)
