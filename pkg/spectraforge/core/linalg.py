"""
Field-generic dense self-adjoint matrix arithmetic.

Every matrix handled by the extremality machinery is a ``HermitianMatrix``: an
immutable, exactly self-adjoint square array over the real or complex numbers.
The functions here provide the eigendecomposition contract, PSD powers,
threshold-relative numerical rank, Schatten norms and PSD tests.

Rank decisions follow the usual SVD convention: a singular value counts when it
exceeds ``n * eps * sigma_max`` unless an explicit threshold is supplied.
"""

from dataclasses import dataclass
from typing import Any, Optional, Union

import numpy as np
import scipy.linalg
from scipy.special import entr

from spectraforge.config import settings
from spectraforge.constants import MACHINE_EPSILON
from spectraforge.core.models import RankDecision, ScalarField
from spectraforge.exceptions import (
    AsymmetryError,
    ConvergenceError,
    DomainError,
    NotPSDError,
    ShapeError,
)
from spectraforge.logger import get_logger

logger = get_logger(__name__)

_EIGEN_DRIVERS = ("evd", "ev")


def _as_square(array: Any) -> np.ndarray:
    a = np.asarray(array)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeError(f"Expected a square matrix, got shape {a.shape}")
    if a.shape[0] < 1:
        raise ShapeError("Matrix dimension must be at least 1")
    return a


@dataclass(frozen=True, eq=False)
class HermitianMatrix:
    """
    Finite self-adjoint matrix over the real or complex field.

    Instances are built through ``from_array`` which symmetrizes the input by
    averaging with its conjugate transpose, so ``data`` is exactly Hermitian.
    """

    data: np.ndarray
    field: ScalarField

    @classmethod
    def from_array(
        cls,
        array: Any,
        field: Optional[Union[ScalarField, str]] = None,
        check: bool = True,
        asymmetry_tol: Optional[float] = None
    ) -> "HermitianMatrix":
        """
        Build a Hermitian matrix from array data.

        Args:
            array: Square array-like (or an existing HermitianMatrix)
            field: Scalar field; inferred from the dtype when omitted
            check: Reject inputs whose asymmetry exceeds ``asymmetry_tol * ||M||_F``
            asymmetry_tol: Relative asymmetry tolerance (defaults to settings)

        Returns:
            HermitianMatrix: The symmetrized matrix

        Raises:
            ShapeError: If the input is not square
            DomainError: If the input holds non-finite entries or complex entries for a real field
            AsymmetryError: If ``check`` is set and the input is too far from self-adjoint
        """
        if isinstance(array, HermitianMatrix):
            if field is None or ScalarField(field) == array.field:
                return array
            array = array.data

        a = _as_square(array)
        if field is None:
            field = ScalarField.COMPLEX if np.iscomplexobj(a) else ScalarField.REAL
        field = ScalarField(field)

        if field is ScalarField.REAL:
            if np.iscomplexobj(a):
                if np.any(a.imag != 0):
                    raise DomainError("Complex entries supplied for a real-field matrix")
                a = a.real
            a = a.astype(np.float64)
        else:
            a = a.astype(np.complex128)

        if not np.all(np.isfinite(a)):
            raise DomainError("Matrix holds non-finite entries")

        adjoint = a.conj().T
        if check:
            tol = settings.asymmetry_tol if asymmetry_tol is None else asymmetry_tol
            asymmetry = float(np.linalg.norm(a - adjoint))
            norm = float(np.linalg.norm(a))
            if asymmetry > tol * norm:
                raise AsymmetryError(
                    f"Matrix is not self-adjoint: ||M - M*||_F = {asymmetry:.3e} "
                    f"exceeds {tol:.1e} * ||M||_F = {tol * norm:.3e}",
                    asymmetry
                )

        data = (a + adjoint) / 2.0
        data.setflags(write=False)
        return cls(data=data, field=field)

    @classmethod
    def identity(cls, n: int, field: Union[ScalarField, str] = ScalarField.REAL) -> "HermitianMatrix":
        """Return the n x n identity over ``field``."""
        return cls.from_array(np.eye(n), field, check=False)

    @property
    def n(self) -> int:
        """Dimension of the matrix."""
        return int(self.data.shape[0])

    @property
    def frobenius_norm(self) -> float:
        """Frobenius norm of the entries."""
        return float(np.linalg.norm(self.data))

    def as_field(self, field: Union[ScalarField, str]) -> "HermitianMatrix":
        """Return the same matrix viewed over another field."""
        return HermitianMatrix.from_array(self.data, field, check=False)

    def __repr__(self) -> str:
        return f"HermitianMatrix(n={self.n}, field={self.field.value})"


def as_hermitian(
    matrix: Any,
    field: Optional[Union[ScalarField, str]] = None
) -> HermitianMatrix:
    """Coerce array data or a HermitianMatrix to a HermitianMatrix."""
    if isinstance(matrix, HermitianMatrix) and field is None:
        return matrix
    return HermitianMatrix.from_array(matrix, field)


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues sorted descending with matching orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        """Return sum_j lambda_j f_j f_j*."""
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T

    def residual(self, matrix: HermitianMatrix) -> float:
        """Frobenius reconstruction residual against ``matrix``."""
        return float(np.linalg.norm(self.reconstruct() - matrix.data))

    def orthonormality_residual(self) -> float:
        """Frobenius distance of the eigenvector Gram matrix from the identity."""
        v = self.eigenvectors
        return float(np.linalg.norm(v.conj().T @ v - np.eye(v.shape[1])))


@dataclass(frozen=True)
class RangeFactor:
    """Eigenpairs of a PSD matrix above its rank threshold."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    threshold: float
    decision: RankDecision

    @property
    def rank(self) -> int:
        return int(self.eigenvalues.shape[0])

    def sqrt(self) -> np.ndarray:
        """Square root of the retained part, F diag(sqrt(lambda)) F*."""
        f = self.eigenvectors
        return (f * np.sqrt(self.eigenvalues)) @ f.conj().T

    def projector(self) -> np.ndarray:
        """Orthogonal projector onto the numerical range."""
        f = self.eigenvectors
        return f @ f.conj().T


def recon_tolerance(matrix: HermitianMatrix) -> float:
    """Default reconstruction tolerance ``recon_tol_factor * ||M||_F * n``."""
    return settings.recon_tol_factor * matrix.frobenius_norm * matrix.n


def default_rank_threshold(singular_values: np.ndarray, n: int) -> float:
    """The ``n * eps * sigma_max`` threshold."""
    if singular_values.size == 0:
        return 0.0
    return float(n * MACHINE_EPSILON * np.max(singular_values))


def eigh(matrix: Any, tol_recon: Optional[float] = None) -> EigenDecomposition:
    """
    Eigendecomposition of a Hermitian matrix.

    Args:
        matrix: HermitianMatrix or array data
        tol_recon: Reconstruction tolerance (defaults to ``recon_tolerance``)

    Returns:
        EigenDecomposition: Real eigenvalues sorted descending, orthonormal eigenvectors

    Raises:
        ConvergenceError: If every LAPACK driver fails or the reconstruction contract is violated
    """
    m = as_hermitian(matrix)
    attempts = 0
    last_error: Optional[Exception] = None
    result = None
    for driver in _EIGEN_DRIVERS:
        attempts += 1
        try:
            result = scipy.linalg.eigh(m.data, driver=driver)
            break
        except (np.linalg.LinAlgError, ValueError) as e:
            last_error = e
            logger.warning(f"Eigen-solver driver '{driver}' failed: {e}")

    if result is None:
        raise ConvergenceError(
            f"Eigen-solver did not converge after {attempts} attempts: {last_error}",
            attempts
        )

    w, v = result
    decomposition = EigenDecomposition(
        eigenvalues=np.ascontiguousarray(w[::-1]),
        eigenvectors=np.ascontiguousarray(v[:, ::-1])
    )

    tol = recon_tolerance(m) if tol_recon is None else tol_recon
    residual = decomposition.residual(m)
    if residual > tol:
        raise ConvergenceError(
            f"Eigendecomposition reconstruction residual {residual:.3e} exceeds {tol:.3e}",
            attempts
        )
    # eigenvectors are unit vectors, so their tolerance is scale-free
    gram_residual = decomposition.orthonormality_residual()
    if gram_residual > settings.recon_tol_factor * m.n:
        raise ConvergenceError(
            f"Eigenvectors are not orthonormal (residual {gram_residual:.3e})",
            attempts
        )
    return decomposition


def _check_psd_spectrum(eigenvalues: np.ndarray, tol_psd: Optional[float]) -> None:
    scale = max(1.0, float(np.max(np.abs(eigenvalues))))
    tol = (settings.psd_tol if tol_psd is None else tol_psd) * scale
    smallest = float(eigenvalues[-1])
    if smallest < -tol:
        raise NotPSDError(
            f"Matrix is not PSD: most negative eigenvalue {smallest:.6e} is below -{tol:.1e}",
            smallest
        )


def psd_power(
    matrix: Any,
    alpha: float,
    cutoff: Optional[float] = None,
    tol_psd: Optional[float] = None
) -> HermitianMatrix:
    """
    Power P^alpha of a PSD matrix.

    Eigenvalues at or below ``cutoff`` are dropped. Without a cutoff,
    ``alpha <= 0`` keeps the eigenpairs counted by ``numerical_rank``
    (pseudo-power, range projector at 0) and other exponents drop only
    nonpositive eigenvalues.

    Args:
        matrix: PSD matrix
        alpha: Real exponent
        cutoff: Eigenvalue cutoff
        tol_psd: Relative PSD tolerance (defaults to settings.psd_tol)

    Returns:
        HermitianMatrix: sum over retained eigenpairs of lambda_j^alpha f_j f_j*

    Raises:
        NotPSDError: If the matrix has an eigenvalue below the PSD tolerance
    """
    p = as_hermitian(matrix)
    decomposition = eigh(p)
    lam = decomposition.eigenvalues
    _check_psd_spectrum(lam, tol_psd)

    if cutoff is None and alpha <= 0:
        rank = numerical_rank(p).rank
        keep = (np.arange(lam.shape[0]) < rank) & (lam > 0.0)
    else:
        keep = lam > (0.0 if cutoff is None else cutoff)
    f = decomposition.eigenvectors[:, keep]
    powered = lam[keep] ** alpha
    return HermitianMatrix.from_array((f * powered) @ f.conj().T, p.field, check=False)


def numerical_rank(matrix: Any, tol: Optional[float] = None) -> RankDecision:
    """
    Numerical rank of a Hermitian matrix.

    Singular values come from ``scipy.linalg.svdvals``.

    Args:
        matrix: HermitianMatrix or array data
        tol: Explicit threshold; defaults to ``n * eps * sigma_max``

    Returns:
        RankDecision: Rank, descending singular values and the threshold used

    Raises:
        ConvergenceError: If the SVD does not converge
    """
    m = as_hermitian(matrix)
    try:
        singular_values = scipy.linalg.svdvals(m.data)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise ConvergenceError(f"Singular values did not converge: {e}", 1) from e
    threshold = default_rank_threshold(singular_values, m.n) if tol is None else float(tol)
    rank = int(np.count_nonzero(singular_values > threshold))
    return RankDecision(
        rank=rank,
        singular_values=[float(s) for s in singular_values],
        threshold_used=threshold
    )


def range_factor(matrix: Any, tol: Optional[float] = None) -> RangeFactor:
    """
    Eigenpairs of a PSD matrix above the rank threshold.

    The rank comes from ``numerical_rank``; the leading eigenpairs up to that
    rank are retained, positive ones only, so the factor spans the numerical
    range of P and agrees with the rank decision.

    Args:
        matrix: PSD matrix
        tol: Explicit rank threshold; defaults to ``n * eps * sigma_max``

    Returns:
        RangeFactor: Retained eigenvalues (descending), eigenvectors, and the rank decision
    """
    p = as_hermitian(matrix)
    decision = numerical_rank(p, tol)
    threshold = decision.threshold_used
    decomposition = eigh(p)
    lam = decomposition.eigenvalues
    keep = (np.arange(lam.shape[0]) < decision.rank) & (lam > 0.0)
    if int(np.count_nonzero(keep)) != decision.rank:
        decision = decision.model_copy(update={"rank": int(np.count_nonzero(keep))})
    return RangeFactor(
        eigenvalues=lam[keep],
        eigenvectors=decomposition.eigenvectors[:, keep],
        threshold=threshold,
        decision=decision
    )


def schatten_norm(matrix: Any, p: float) -> float:
    """
    Schatten p-norm (sum_j sigma_j^p)^(1/p).

    ``p = 1`` is the trace norm, ``p = 2`` the Frobenius norm and ``p = inf``
    the operator norm.

    Raises:
        DomainError: If p < 1
    """
    if not p >= 1:
        raise DomainError(f"Schatten norm requires p >= 1, got {p}")
    m = as_hermitian(matrix)
    singular_values = np.abs(eigh(m).eigenvalues)
    top = float(np.max(singular_values))
    if top == 0.0:
        return 0.0
    if np.isinf(p):
        return top
    # factor out sigma_max so large p does not overflow
    return top * float(np.sum((singular_values / top) ** p) ** (1.0 / p))


def is_psd(matrix: Any, tol: Optional[float] = None) -> bool:
    """True iff the smallest eigenvalue is at least ``-tol`` (defaults to settings.psd_tol)."""
    m = as_hermitian(matrix)
    threshold = settings.psd_tol if tol is None else tol
    smallest = float(scipy.linalg.eigvalsh(m.data)[0])
    return smallest >= -threshold


def min_eigenvalue(matrix: Any) -> float:
    """Smallest eigenvalue of a Hermitian matrix."""
    return float(scipy.linalg.eigvalsh(as_hermitian(matrix).data)[0])


def operator_norm(matrix: Any) -> float:
    """Largest singular value."""
    m = as_hermitian(matrix)
    return float(np.max(np.abs(scipy.linalg.eigvalsh(m.data))))


def trace_inner(a: Any, b: Any) -> float:
    """Real trace inner product Re Tr(A B) of two Hermitian matrices."""
    a = a.data if isinstance(a, HermitianMatrix) else np.asarray(a)
    b = b.data if isinstance(b, HermitianMatrix) else np.asarray(b)
    return float(np.real(np.sum(a * b.T)))


def von_neumann_entropy(matrix: Any) -> float:
    """-Tr(P log P) from the spectrum, with 0 log 0 taken as 0."""
    lam = np.clip(scipy.linalg.eigvalsh(as_hermitian(matrix).data), 0.0, None)
    return float(np.sum(entr(lam)))
