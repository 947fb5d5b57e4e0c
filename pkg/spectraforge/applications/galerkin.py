"""
Galerkin discretization on L^2([0, 1]).

Bases are piecewise orthonormal Legendre polynomials over a partition of
[0, 1]; a single cell gives the shifted Legendre basis sqrt(2k+1) P_k(2u - 1).
All integrals are evaluated with per-cell Gauss-Legendre quadrature, which is
exact for the polynomial integrands used by the moment operators.
"""

from dataclasses import dataclass
from typing import Callable, List, Sequence, Tuple

import numpy as np
from numpy.polynomial import legendre

from spectraforge.constants import MAX_BASIS_SIZE
from spectraforge.core.linalg import HermitianMatrix
from spectraforge.core.models import ScalarField
from spectraforge.exceptions import DomainError, ValidationError
from spectraforge.logger import get_logger

logger = get_logger(__name__)

# Gauss points per cell for non-polynomial integrands
DEFAULT_QUADRATURE_POINTS = 48


@dataclass(frozen=True)
class GalerkinBasis:
    """
    Orthonormal basis of piecewise polynomials of degree < ``per_cell``.

    Basis function ``c * per_cell + k`` is the degree-k orthonormal Legendre
    polynomial on cell c and zero elsewhere.
    """

    breakpoints: Tuple[float, ...]
    per_cell: int

    @classmethod
    def legendre(cls, m: int) -> "GalerkinBasis":
        """The first m shifted Legendre polynomials on [0, 1]."""
        return cls.piecewise_legendre((0.0, 1.0), m)

    @classmethod
    def piecewise_legendre(cls, breakpoints: Sequence[float], per_cell: int) -> "GalerkinBasis":
        """
        Piecewise Legendre basis over the partition given by ``breakpoints``.

        Raises:
            ValidationError: If the breakpoints are not strictly increasing from 0 to 1
                or the basis would exceed MAX_BASIS_SIZE
        """
        points = tuple(float(b) for b in breakpoints)
        if len(points) < 2 or points[0] != 0.0 or points[-1] != 1.0:
            raise ValidationError("Breakpoints must start at 0 and end at 1")
        if any(b <= a for a, b in zip(points, points[1:])):
            raise ValidationError("Breakpoints must be strictly increasing")
        if per_cell < 1:
            raise ValidationError(f"Need at least one function per cell, got {per_cell}")
        size = (len(points) - 1) * per_cell
        if size > MAX_BASIS_SIZE:
            raise ValidationError(f"Basis size {size} exceeds the limit of {MAX_BASIS_SIZE}")
        return cls(breakpoints=points, per_cell=per_cell)

    @property
    def cells(self) -> List[Tuple[float, float]]:
        return list(zip(self.breakpoints[:-1], self.breakpoints[1:]))

    @property
    def size(self) -> int:
        return len(self.cells) * self.per_cell

    def quadrature(self, points: int) -> Tuple[np.ndarray, np.ndarray]:
        """Gauss-Legendre nodes and weights with ``points`` nodes in every cell."""
        xi, w = legendre.leggauss(points)
        nodes = []
        weights = []
        for a, b in self.cells:
            half = (b - a) / 2.0
            nodes.append(a + half * (xi + 1.0))
            weights.append(half * w)
        return np.concatenate(nodes), np.concatenate(weights)

    def evaluate(self, u: Sequence[float]) -> np.ndarray:
        """
        Basis values at the points ``u``, shape (len(u), size).

        Cells are half-open [a, b) except the last, which includes 1.
        """
        u = np.atleast_1d(np.asarray(u, dtype=np.float64))
        values = np.zeros((u.shape[0], self.size))
        cells = self.cells
        scale = np.sqrt(2.0 * np.arange(self.per_cell) + 1.0)
        for c, (a, b) in enumerate(cells):
            upper = (u <= b) if c == len(cells) - 1 else (u < b)
            inside = (u >= a) & upper
            if not np.any(inside):
                continue
            h = b - a
            t = 2.0 * (u[inside] - a) / h - 1.0
            block = legendre.legvander(t, self.per_cell - 1) * scale / np.sqrt(h)
            values[np.ix_(inside, range(c * self.per_cell, (c + 1) * self.per_cell))] = block
        return values

    def _points_for_degree(self, degree: int) -> int:
        # n Gauss points integrate degree 2n - 1 exactly
        return self.per_cell + (degree + 1) // 2 + 1

    def gram(self) -> np.ndarray:
        """Basis Gram matrix by quadrature; the identity up to rounding."""
        nodes, weights = self.quadrature(self._points_for_degree(0))
        phi = self.evaluate(nodes)
        return (phi * weights[:, None]).T @ phi

    def verify_orthonormal(self, tol: float = 1e-12) -> float:
        """
        Largest deviation of the Gram matrix from the identity.

        Raises:
            DomainError: If the deviation exceeds ``tol``
        """
        deviation = float(np.max(np.abs(self.gram() - np.eye(self.size))))
        if deviation > tol:
            raise DomainError(f"Basis is not orthonormal: Gram deviation {deviation:.3e} > {tol:.1e}")
        return deviation

    def multiplication_operator(self, degree: int) -> HermitianMatrix:
        """Matrix of f(u) -> u^degree f(u): entries int u^degree phi_k phi_l du."""
        if degree < 0:
            raise ValidationError(f"Moment degree must be nonnegative, got {degree}")
        nodes, weights = self.quadrature(self._points_for_degree(degree))
        phi = self.evaluate(nodes)
        matrix = (phi * (weights * nodes ** degree)[:, None]).T @ phi
        return HermitianMatrix.from_array(matrix, ScalarField.REAL, check=False)

    def project_function(
        self,
        function: Callable[[np.ndarray], np.ndarray],
        points: int = DEFAULT_QUADRATURE_POINTS
    ) -> np.ndarray:
        """Coefficients int f phi_k du of a vectorized function."""
        nodes, weights = self.quadrature(points)
        values = np.asarray(function(nodes))
        return self.evaluate(nodes).T @ (weights * values)

    def discretize_kernel(
        self,
        kernel: Callable[[np.ndarray, np.ndarray], np.ndarray],
        points: int = DEFAULT_QUADRATURE_POINTS
    ) -> HermitianMatrix:
        """
        Galerkin matrix of the integral operator with a symmetric kernel K(s, t).

        Entries are int int phi_k(s) K(s, t) phi_l(t) ds dt; for a covariance
        kernel the result is a covariance operator in basis coordinates.
        """
        nodes, weights = self.quadrature(points)
        phi = self.evaluate(nodes) * weights[:, None]
        k = np.asarray(kernel(nodes[:, None], nodes[None, :]))
        return HermitianMatrix.from_array(phi.T @ k @ phi, ScalarField.REAL, check=False)


def galerkin_moment_operators(m: int, degrees: Sequence[int]) -> List[HermitianMatrix]:
    """
    Moment operators M^(j) in the first m shifted Legendre polynomials.

    Raises:
        ValidationError: If m < 1 or ``degrees`` is empty or holds a negative entry
    """
    if m < 1:
        raise ValidationError(f"Basis size must be at least 1, got {m}")
    if len(degrees) == 0:
        raise ValidationError("At least one moment degree is required")
    basis = GalerkinBasis.legendre(m)
    operators = [basis.multiplication_operator(int(j)) for j in degrees]
    logger.debug(f"Built {len(operators)} moment operators of size {m}", extra={"degrees": list(degrees)})
    return operators
