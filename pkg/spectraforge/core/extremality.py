"""
Extremality of points of a spectrahedron.

For a feasible P of rank r with eigenpairs (lambda_j, f_j) above the rank
threshold, the self-adjoint matrices with range inside range(P) form a real
vector space X(P) of dimension r(r+1)/2 (real field) or r^2 (complex field).
The orthonormal basis used throughout is

    {f_i f_i*} u {(f_i f_j* + f_j f_i*) / sqrt(2)} u {i (f_i f_j* - f_j f_i*) / sqrt(2)}

(the last family only over the complex field). Writing
L[k, m] = Tr(sqrt(P) A_k sqrt(P) B_m), the perturbation Gram matrix is
G = L L^T with G_ij = Tr(P A_i P A_j), and P is extreme exactly when
rank G = dim X(P). The null space of L parametrizes the even perturbations
H = sqrt(P) X sqrt(P) with Tr(A_k H) = 0.
"""

from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg

from spectraforge.config import settings
from spectraforge.core.linalg import (
    HermitianMatrix,
    RangeFactor,
    as_hermitian,
    min_eigenvalue,
    numerical_rank,
    operator_norm,
    range_factor,
    trace_inner,
)
from spectraforge.core.models import (
    ExtremalityReport,
    MembershipReport,
    RankDecision,
    ScalarField,
)
from spectraforge.core.spectrahedron import Spectrahedron, membership
from spectraforge.exceptions import (
    ConvergenceError,
    DomainError,
    NotPSDError,
    NumericalError,
    PreconditionError,
    ShapeError,
)
from spectraforge.logger import get_logger
from spectraforge.parser.codec import encode_matrix

logger = get_logger(__name__)


def dim_x(rank: int, field: Union[ScalarField, str]) -> int:
    """Real dimension of self-adjoint r x r matrices over ``field``."""
    if ScalarField(field) is ScalarField.REAL:
        return rank * (rank + 1) // 2
    return rank * rank


def bp_rank_bound(n_constraints: int, field: Union[ScalarField, str]) -> int:
    """
    Largest rank an extreme point can have with ``n_constraints`` constraints.

    That is the largest r with r(r+1)/2 <= n (real) or r^2 <= n (complex).
    """
    if n_constraints < 0:
        raise DomainError(f"Constraint count must be nonnegative, got {n_constraints}")
    r = 0
    while dim_x(r + 1, field) <= n_constraints:
        r += 1
    return r


def hermitian_coordinates(reduced: np.ndarray, field: Union[ScalarField, str]) -> np.ndarray:
    """Coordinates of an r x r Hermitian matrix in the orthonormal basis of X(P)."""
    r = reduced.shape[0]
    upper = np.triu_indices(r, k=1)
    off = reduced[upper]
    parts = [np.real(np.diag(reduced)), np.sqrt(2.0) * np.real(off)]
    if ScalarField(field) is ScalarField.COMPLEX:
        parts.append(np.sqrt(2.0) * np.imag(off))
    return np.concatenate(parts)


def hermitian_from_coordinates(
    coordinates: np.ndarray,
    rank: int,
    field: Union[ScalarField, str]
) -> np.ndarray:
    """Inverse of ``hermitian_coordinates``."""
    field = ScalarField(field)
    upper = np.triu_indices(rank, k=1)
    k = upper[0].shape[0]
    dtype = np.complex128 if field is ScalarField.COMPLEX else np.float64
    x = np.zeros((rank, rank), dtype=dtype)
    x[np.diag_indices(rank)] = coordinates[:rank]
    off = coordinates[rank:rank + k] / np.sqrt(2.0)
    if field is ScalarField.COMPLEX:
        off = off + 1j * coordinates[rank + k:rank + 2 * k] / np.sqrt(2.0)
    x[upper] = off
    x[(upper[1], upper[0])] = np.conj(off)
    return x


@dataclass(frozen=True)
class RestrictedSystem:
    """The linear system L of the perturbation condition, with its ingredients."""

    factor: RangeFactor
    matrix: np.ndarray
    field: ScalarField

    @property
    def rank(self) -> int:
        return self.factor.rank

    @property
    def dim_x(self) -> int:
        return dim_x(self.factor.rank, self.field)

    def gram(self) -> np.ndarray:
        return self.matrix @ self.matrix.T


def _coerce_point(point: Any, spectrahedron: Spectrahedron) -> HermitianMatrix:
    p = as_hermitian(point)
    if p.n != spectrahedron.n:
        raise ShapeError(f"Point has dimension {p.n}, spectrahedron has {spectrahedron.n}")
    return p.as_field(spectrahedron.field) if p.field != spectrahedron.field else p


def _require_psd(p: HermitianMatrix, tol: float, label: str = "P") -> None:
    smallest = min_eigenvalue(p)
    limit = tol * max(1.0, operator_norm(p))
    if smallest < -limit:
        raise NotPSDError(
            f"{label} is not PSD: most negative eigenvalue {smallest:.6e} is below -{limit:.1e}",
            smallest
        )


def range_restricted_system(
    point: Any,
    spectrahedron: Spectrahedron,
    rank_tol: Optional[float] = None
) -> RestrictedSystem:
    """
    Build L[k, m] = Tr(sqrt(P) A_k sqrt(P) B_m).

    The reduced matrices D F* A_k F D (D = diag(sqrt(lambda))) carry the same
    information in r x r form, so L is read off their coordinates.
    """
    p = _coerce_point(point, spectrahedron)
    factor = range_factor(p, rank_tol)
    f = factor.eigenvectors
    d = np.sqrt(factor.eigenvalues)
    rows = []
    for matrix in spectrahedron.matrices:
        reduced = (f.conj().T @ matrix.data @ f) * np.outer(d, d)
        rows.append(hermitian_coordinates(reduced, spectrahedron.field))
    dimension = dim_x(factor.rank, spectrahedron.field)
    system = np.array(rows, dtype=np.float64).reshape(len(rows), dimension)
    return RestrictedSystem(factor=factor, matrix=system, field=spectrahedron.field)


def _gram_matrix(system: RestrictedSystem) -> np.ndarray:
    gram = system.gram()
    return (gram + gram.T) / 2.0


def perturbation_gram(
    point: Any,
    spectrahedron: Spectrahedron,
    tol: Optional[float] = None,
    rank_tol: Optional[float] = None
) -> np.ndarray:
    """
    Perturbation Gram matrix G_ij = Tr(P A_i P A_j).

    G is the Gram matrix of {sqrt(P) A_i sqrt(P)} under the real trace inner
    product, hence real symmetric PSD.

    Raises:
        NotPSDError: If P is not PSD within ``tol``
    """
    tol = settings.feasibility_tol if tol is None else tol
    p = _coerce_point(point, spectrahedron)
    _require_psd(p, tol)
    return _gram_matrix(range_restricted_system(p, spectrahedron, rank_tol))


def gram_rank(system: RestrictedSystem, tol: Optional[float] = None) -> RankDecision:
    """
    Numerical rank of the explicitly formed G = L L^T.

    The threshold defaults to ``m * eps * sigma_max(G)`` for m constraints.
    """
    if system.matrix.shape[0] == 0:
        return RankDecision(rank=0, singular_values=[], threshold_used=0.0 if tol is None else float(tol))
    gram = HermitianMatrix.from_array(_gram_matrix(system), ScalarField.REAL, check=False)
    return numerical_rank(gram, tol)


def _feasible_point(point: Any, spectrahedron: Spectrahedron, tol: float) -> HermitianMatrix:
    p = _coerce_point(point, spectrahedron)
    feasibility = membership(spectrahedron, p, tol)
    if not feasibility.feasible:
        raise PreconditionError(
            f"Point is not feasible (psd_violation={feasibility.psd_violation:.3e}, "
            f"max_scaled_residual={feasibility.max_scaled_residual:.3e}, tol={tol:.1e})",
            feasibility
        )
    return p


def extremality_rank_test(
    point: Any,
    spectrahedron: Spectrahedron,
    tol: Optional[float] = None,
    rank_tol: Optional[float] = None,
    gram_tol: Optional[float] = None
) -> ExtremalityReport:
    """
    Rank test: P is extreme iff rank [Tr(P A_i P A_j)] = dim X(P).

    G is formed explicitly and its rank taken with ``numerical_rank``.

    Args:
        point: Feasible point P
        spectrahedron: Constraint set
        tol: Feasibility tolerance of the precondition
        rank_tol: Rank threshold for P (defaults to n * eps * sigma_max)
        gram_tol: Rank threshold for the Gram matrix (same convention)

    Returns:
        ExtremalityReport: Ranks, dimension of X(P), verdict and thresholds

    Raises:
        PreconditionError: If P is infeasible; carries the MembershipReport
    """
    tol = settings.feasibility_tol if tol is None else tol
    p = _feasible_point(point, spectrahedron, tol)
    system = range_restricted_system(p, spectrahedron, rank_tol)
    decision = gram_rank(system, gram_tol)
    dimension = system.dim_x
    # rank G = rank L cannot exceed the column count of L
    g = min(decision.rank, dimension)
    report = ExtremalityReport(
        field=spectrahedron.field,
        n=spectrahedron.n,
        n_constraints=len(spectrahedron),
        rank_P=system.rank,
        gram_rank=g,
        dim_X=dimension,
        is_extreme=g == dimension,
        facial_dimension=dimension - g,
        rank_threshold=system.factor.threshold,
        gram_threshold=decision.threshold_used,
        method="gram",
        tol=tol
    )
    logger.debug(
        f"Extremality: rank_P={report.rank_P}, gram_rank={g}, dim_X={dimension}",
        extra={"rank_threshold": report.rank_threshold, "gram_threshold": report.gram_threshold}
    )
    return report


def facial_dimension(
    point: Any,
    spectrahedron: Spectrahedron,
    tol: Optional[float] = None,
    rank_tol: Optional[float] = None,
    gram_tol: Optional[float] = None
) -> int:
    """dim X(P) minus the Gram rank; zero exactly at extreme points."""
    return extremality_rank_test(point, spectrahedron, tol, rank_tol, gram_tol).facial_dimension


@dataclass(frozen=True)
class PerturbationWitness:
    """An even perturbation H = sqrt(P) X sqrt(P) certifying non-extremality."""

    X: HermitianMatrix
    H: HermitianMatrix
    norm_X: float
    feasibility_plus: MembershipReport
    feasibility_minus: MembershipReport
    null_space_dimension: int
    singular_value: float
    constraint_residuals: List[float]

    @property
    def is_valid(self) -> bool:
        return self.feasibility_plus.feasible and self.feasibility_minus.feasible

    def to_dict(self) -> Dict[str, Any]:
        return {
            "X": encode_matrix(self.X),
            "H": encode_matrix(self.H),
            "norm_X": self.norm_X,
            "feasibility_plus": self.feasibility_plus.model_dump(mode="json"),
            "feasibility_minus": self.feasibility_minus.model_dump(mode="json"),
            "null_space_dimension": self.null_space_dimension,
            "singular_value": self.singular_value,
            "constraint_residuals": list(self.constraint_residuals),
        }


def _null_space(
    system: RestrictedSystem,
    gram_tol: Optional[float]
) -> Tuple[np.ndarray, np.ndarray, float]:
    """
    Right null vectors of L (as rows) with their singular values and the threshold.

    The default threshold is ``settings.null_space_rcond * sigma_max(L)``; an
    explicit Gram threshold applies to the squared singular values of L.
    """
    rows, dimension = system.matrix.shape
    if dimension == 0:
        return np.zeros((0, 0)), np.zeros(0), 0.0
    if rows == 0:
        return np.eye(dimension), np.zeros(dimension), 0.0
    try:
        _, s, vh = scipy.linalg.svd(system.matrix, full_matrices=True)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise ConvergenceError(f"SVD of the restricted system did not converge: {e}", 1) from e

    extended = np.zeros(dimension)
    extended[:s.shape[0]] = s
    if gram_tol is None:
        threshold = settings.null_space_rcond * float(extended[0])
    else:
        threshold = float(np.sqrt(gram_tol))
    null = extended <= threshold
    return vh[null], extended[null], threshold


def _build_witness(
    p: HermitianMatrix,
    spectrahedron: Spectrahedron,
    factor: RangeFactor,
    reduced: np.ndarray,
    tol: float,
    null_space_dimension: int,
    singular_value: float
) -> Optional[PerturbationWitness]:
    f = factor.eigenvectors
    d = np.sqrt(factor.eigenvalues)
    x = f @ reduced @ f.conj().T
    h = f @ (reduced * np.outer(d, d)) @ f.conj().T
    if float(np.linalg.norm(h)) <= settings.witness_floor_factor * p.frobenius_norm:
        return None

    field = spectrahedron.field
    x_matrix = HermitianMatrix.from_array(x, field, check=False)
    h_matrix = HermitianMatrix.from_array(h, field, check=False)
    return PerturbationWitness(
        X=x_matrix,
        H=h_matrix,
        norm_X=operator_norm(x_matrix),
        feasibility_plus=membership(spectrahedron, p.data + h_matrix.data, tol),
        feasibility_minus=membership(spectrahedron, p.data - h_matrix.data, tol),
        null_space_dimension=null_space_dimension,
        singular_value=singular_value,
        constraint_residuals=[abs(trace_inner(a, h_matrix)) for a in spectrahedron.matrices]
    )


def find_even_perturbation(
    point: Any,
    spectrahedron: Spectrahedron,
    tol: Optional[float] = None,
    rank_tol: Optional[float] = None,
    gram_tol: Optional[float] = None
) -> Optional[PerturbationWitness]:
    """
    Search for a nonzero X in X(P) with Tr(sqrt(P) A_k sqrt(P) X) = 0 for all k.

    The null space of L is read from its full SVD, independently of the Gram
    rank used by ``extremality_rank_test``. When it is trivial P is extreme and
    ``None`` is returned. Otherwise null vectors are tried in order of
    increasing singular value (lowest index on ties), each scaled to operator
    norm ``settings.witness_norm`` and halved up to
    ``settings.witness_max_halvings`` times until P +/- H passes the
    feasibility recheck.

    Args:
        point: Feasible point P
        spectrahedron: Constraint set
        tol: Feasibility tolerance of the precondition and of the recheck
        rank_tol: Rank threshold for P
        gram_tol: Explicit threshold on the squared singular values of L;
            defaults to ``(settings.null_space_rcond * sigma_max(L))^2``

    Returns:
        PerturbationWitness with ``is_valid`` set, or None when P is extreme

    Raises:
        PreconditionError: If P is infeasible
        NumericalError: If the null space is nontrivial but no candidate passes the recheck
    """
    tol = settings.feasibility_tol if tol is None else tol
    p = _feasible_point(point, spectrahedron, tol)
    system = range_restricted_system(p, spectrahedron, rank_tol)
    vectors, singular_values, threshold = _null_space(system, gram_tol)
    null_dimension = int(vectors.shape[0])
    logger.debug(
        f"Witness search: rank_P={system.rank}, dim_X={system.dim_x}, null space dimension {null_dimension}",
        extra={"null_threshold": threshold}
    )
    if null_dimension == 0:
        return None

    factor = system.factor
    order = sorted(range(null_dimension), key=lambda index: (singular_values[index], index))
    for index in order:
        reduced = hermitian_from_coordinates(vectors[index], factor.rank, spectrahedron.field)
        reduced_norm = float(np.max(np.abs(scipy.linalg.eigvalsh(reduced))))
        if reduced_norm == 0.0:
            continue
        scale = settings.witness_norm / reduced_norm
        for halving in range(settings.witness_max_halvings + 1):
            witness = _build_witness(
                p, spectrahedron, factor, reduced * scale, tol,
                null_dimension, float(singular_values[index])
            )
            if witness is None:
                logger.debug(f"Null vector {index} gives a numerically zero perturbation, skipping")
                break
            if witness.is_valid:
                if halving:
                    logger.info(f"Witness from null vector {index} passed its recheck after {halving} halvings")
                return witness
            scale /= 2.0
        logger.debug(f"Null vector {index} gives no feasible P +/- H")

    raise NumericalError(
        f"L has a {null_dimension}-dimensional null space (threshold {threshold:.3e}) "
        "but no null vector gives a perturbation with P +/- H feasible"
    )


def douglas_factor(
    point: Any,
    perturbation: Any,
    tol: Optional[float] = None,
    rank_tol: Optional[float] = None
) -> HermitianMatrix:
    """
    Factor an even perturbation as H = sqrt(P) X sqrt(P).

    X = sqrt(P)^+ H sqrt(P)^+ restricted to the range of P; when P +/- H are PSD
    its operator norm is at most 1.

    Raises:
        ShapeError: If P and H differ in dimension
        NotPSDError: If P, P + H or P - H is not PSD within ``tol``
        NumericalError: If sqrt(P) X sqrt(P) misses H by more than
            ``recon_tol_factor * n * max(1, ||H||_F)``
    """
    tol = settings.feasibility_tol if tol is None else tol
    p = as_hermitian(point)
    h = as_hermitian(perturbation)
    if p.n != h.n:
        raise ShapeError(f"P has dimension {p.n}, H has {h.n}")
    field = ScalarField.COMPLEX if ScalarField.COMPLEX in (p.field, h.field) else ScalarField.REAL
    p, h = p.as_field(field), h.as_field(field)

    _require_psd(p, tol)
    _require_psd(HermitianMatrix.from_array(p.data + h.data, field, check=False), tol, "P + H")
    _require_psd(HermitianMatrix.from_array(p.data - h.data, field, check=False), tol, "P - H")

    factor = range_factor(p, rank_tol)
    f = factor.eigenvectors
    inv_sqrt = 1.0 / np.sqrt(factor.eigenvalues)
    reduced = (f.conj().T @ h.data @ f) * np.outer(inv_sqrt, inv_sqrt)
    x = HermitianMatrix.from_array(f @ reduced @ f.conj().T, field, check=False)

    root = factor.sqrt()
    residual = float(np.linalg.norm(root @ x.data @ root - h.data))
    limit = settings.recon_tol_factor * p.n * max(1.0, h.frobenius_norm)
    if residual > limit:
        raise NumericalError(
            f"Douglas reconstruction residual {residual:.3e} exceeds {limit:.3e}; "
            "H has a component outside the range of P",
            residual
        )
    return x


def rank_one_extreme_check(
    spectrahedron: Spectrahedron,
    vector: Sequence[Any],
    tol: Optional[float] = None
) -> bool:
    """
    Whether x x* is a rank-one extreme point.

    It is exactly when <A_j x, x> = c_j for all j and the targets are not all
    zero; with all-zero targets there are no rank-one extreme points.

    Raises:
        DomainError: If x is the zero vector
        ShapeError: If x has the wrong length
    """
    tol = settings.feasibility_tol if tol is None else tol
    x = np.asarray(vector)
    if x.ndim != 1 or x.shape[0] != spectrahedron.n:
        raise ShapeError(f"Vector must have length {spectrahedron.n}")
    if not np.any(x != 0):
        raise DomainError("Rank-one check needs a nonzero vector")
    if not np.any(spectrahedron.targets != 0):
        return False
    for constraint in spectrahedron.constraints:
        value = float(np.real(np.vdot(x, constraint.matrix.data @ x)))
        if abs(value - constraint.target) > tol * constraint.scale:
            return False
    return True
