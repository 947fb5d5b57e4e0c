"""
Spectrahedra given by finitely many trace-linear equality constraints.

A spectrahedron is the set {P >= 0 : Tr(A_k P) = c_k for every k}. Constraint
matrices are stored symmetrized, in the order the caller supplied them.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Any, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg

from spectraforge.config import settings
from spectraforge.core.linalg import HermitianMatrix, as_hermitian, trace_inner
from spectraforge.core.models import MembershipReport, ScalarField
from spectraforge.exceptions import DomainError, ShapeError, ValidationError
from spectraforge.logger import get_logger

logger = get_logger(__name__)


class SpectrahedronKind(str, Enum):
    """Canonical constraint families."""
    ELLIPTOPE = "elliptope"
    DENSITY = "density"
    CUSTOM = "custom"


@dataclass(frozen=True)
class Constraint:
    """One trace-linear constraint Tr(A P) = c."""

    matrix: HermitianMatrix
    target: float
    label: Optional[str] = None

    @property
    def scale(self) -> float:
        """max(1, |c|, ||A||_2), the residual scale used by membership."""
        spectral_norm = float(np.max(np.abs(scipy.linalg.eigvalsh(self.matrix.data))))
        return max(1.0, abs(self.target), spectral_norm)


@dataclass(frozen=True)
class Spectrahedron:
    """Ambient dimension, scalar field and ordered constraint list."""

    field: ScalarField
    n: int
    constraints: Tuple[Constraint, ...]

    def __len__(self) -> int:
        return len(self.constraints)

    @property
    def matrices(self) -> List[HermitianMatrix]:
        return [c.matrix for c in self.constraints]

    @property
    def targets(self) -> np.ndarray:
        return np.array([c.target for c in self.constraints], dtype=np.float64)

    @property
    def labels(self) -> List[Optional[str]]:
        return [c.label for c in self.constraints]

    def with_field(self, field: Union[ScalarField, str]) -> "Spectrahedron":
        """The same constraint data read over another field."""
        field = ScalarField(field)
        constraints = tuple(
            Constraint(c.matrix.as_field(field), c.target, c.label) for c in self.constraints
        )
        return Spectrahedron(field=field, n=self.n, constraints=constraints)


def symmetrize_constraint(
    matrix: Any,
    field: Optional[Union[ScalarField, str]] = None
) -> HermitianMatrix:
    """
    Return (A + A*) / 2.

    Tr(A P) and Tr(((A + A*) / 2) P) agree in real part for every Hermitian P,
    so the symmetrized matrix defines the same constraint.

    Raises:
        ShapeError: If A is not square
    """
    if isinstance(matrix, HermitianMatrix):
        return matrix if field is None else matrix.as_field(field)
    return HermitianMatrix.from_array(matrix, field, check=False)


def _real_target(value: Any, index: int) -> float:
    target = complex(value)
    if target.imag != 0.0:
        raise DomainError(
            f"Constraint {index} has non-real target {value}; Tr(A P) is real for Hermitian A"
        )
    return float(target.real)


def _field_of(matrices: Sequence[Any]) -> ScalarField:
    for m in matrices:
        data = m.data if isinstance(m, HermitianMatrix) else np.asarray(m)
        if np.iscomplexobj(data) and np.any(np.imag(data) != 0):
            return ScalarField.COMPLEX
    return ScalarField.REAL


def custom(
    constraints: Sequence[Sequence[Any]],
    field: Optional[Union[ScalarField, str]] = None
) -> Spectrahedron:
    """
    Spectrahedron from user-supplied (A, c) or (A, c, label) entries.

    Raises:
        ValidationError: If the list is empty or an entry is malformed
        ShapeError: If the constraint matrices disagree in dimension
        DomainError: If a target is not real
    """
    if not constraints:
        raise ValidationError("A custom spectrahedron needs at least one constraint")

    entries = []
    for index, entry in enumerate(constraints):
        if len(entry) not in (2, 3):
            raise ValidationError(f"Constraint {index} must be (A, c) or (A, c, label)")
        entries.append((entry[0], entry[1], entry[2] if len(entry) == 3 else None))

    resolved = ScalarField(field) if field is not None else _field_of([e[0] for e in entries])
    built = []
    n: Optional[int] = None
    for index, (matrix, target, label) in enumerate(entries):
        symmetric = symmetrize_constraint(matrix, resolved)
        if n is None:
            n = symmetric.n
        elif symmetric.n != n:
            raise ShapeError(
                f"Constraint {index} has dimension {symmetric.n}, expected {n}"
            )
        built.append(Constraint(symmetric, _real_target(target, index), label))

    assert n is not None
    return Spectrahedron(field=resolved, n=n, constraints=tuple(built))


def elliptope(n: int, field: Union[ScalarField, str] = ScalarField.REAL) -> Spectrahedron:
    """Correlation matrices: constraints (e_j e_j*, 1) for j = 1..n."""
    if n < 1:
        raise ValidationError(f"Dimension must be at least 1, got {n}")
    constraints = []
    for j in range(n):
        a = np.zeros((n, n))
        a[j, j] = 1.0
        constraints.append((a, 1.0, f"diag_{j}"))
    return custom(constraints, field)


def density(n: int, field: Union[ScalarField, str] = ScalarField.REAL) -> Spectrahedron:
    """Density operators: the single constraint (I, 1)."""
    if n < 1:
        raise ValidationError(f"Dimension must be at least 1, got {n}")
    return custom([(np.eye(n), 1.0, "trace")], field)


def diagonal_constrained(
    diagonal: Sequence[float],
    field: Union[ScalarField, str] = ScalarField.COMPLEX
) -> Spectrahedron:
    """The spectrahedron {P >= 0 : P_jj = d_j}."""
    d = np.asarray(diagonal, dtype=np.float64)
    n = d.shape[0]
    constraints = []
    for j in range(n):
        a = np.zeros((n, n))
        a[j, j] = 1.0
        constraints.append((a, float(d[j]), f"diag_{j}"))
    return custom(constraints, field)


def build_spectrahedron(
    kind: Union[SpectrahedronKind, str],
    n: Optional[int] = None,
    field: Union[ScalarField, str] = ScalarField.REAL,
    constraints: Optional[Sequence[Sequence[Any]]] = None
) -> Spectrahedron:
    """
    Build one of the canonical spectrahedra.

    Args:
        kind: elliptope, density or custom
        n: Dimension (elliptope and density)
        field: Scalar field
        constraints: Constraint entries (custom)

    Returns:
        Spectrahedron: The constraint set
    """
    kind = SpectrahedronKind(kind)
    if kind is SpectrahedronKind.CUSTOM:
        return custom(constraints or [], field)
    if n is None:
        raise ValidationError(f"'{kind.value}' spectrahedron requires a dimension")
    if kind is SpectrahedronKind.ELLIPTOPE:
        return elliptope(n, field)
    return density(n, field)


def membership(
    spectrahedron: Spectrahedron,
    point: Any,
    tol: Optional[float] = None
) -> MembershipReport:
    """
    Feasibility of ``point`` for ``spectrahedron``.

    The point is feasible when its most negative eigenvalue is at least ``-tol``
    and every residual |Tr(A_k P) - c_k| is at most ``tol * max(1, |c_k|, ||A_k||_2)``.

    Raises:
        ShapeError: If the point's dimension differs from the spectrahedron's
    """
    tol = settings.feasibility_tol if tol is None else tol
    p = as_hermitian(point)
    if p.n != spectrahedron.n:
        raise ShapeError(f"Point has dimension {p.n}, spectrahedron has {spectrahedron.n}")

    smallest = float(scipy.linalg.eigvalsh(p.data)[0])
    psd_violation = max(0.0, -smallest)

    residuals = []
    scales = []
    for constraint in spectrahedron.constraints:
        residuals.append(abs(trace_inner(constraint.matrix, p) - constraint.target))
        scales.append(constraint.scale)

    scaled = [r / s for r, s in zip(residuals, scales)]
    max_scaled = max(scaled) if scaled else 0.0
    feasible = psd_violation <= tol and max_scaled <= tol

    logger.debug(
        f"Membership: psd_violation={psd_violation:.3e}, max_scaled_residual={max_scaled:.3e}",
        extra={"feasible": feasible, "tol": tol}
    )
    return MembershipReport(
        psd_violation=psd_violation,
        constraint_residuals=residuals,
        scales=scales,
        labels=spectrahedron.labels,
        max_scaled_residual=max_scaled,
        feasible=feasible,
        tol=tol
    )
