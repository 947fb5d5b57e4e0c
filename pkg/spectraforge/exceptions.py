"""spectraforge custom exceptions."""

from typing import Any, Optional


class SpectraForgeError(Exception):
    """Base exception for spectraforge."""
    pass


class ValidationError(SpectraForgeError):
    """Raised when an input document or parameter set is invalid."""
    pass


class ShapeError(SpectraForgeError):
    """Raised on non-square inputs or dimension mismatches."""
    pass


class DomainError(SpectraForgeError):
    """Raised when a mathematical precondition does not hold."""
    pass


class NotPSDError(DomainError):
    """Raised when a matrix is not positive semi-definite within tolerance."""

    def __init__(self, message: str, min_eigenvalue: float):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class AsymmetryError(DomainError):
    """Raised when a matrix is too far from self-adjoint to be symmetrized."""

    def __init__(self, message: str, asymmetry: float):
        super().__init__(message)
        self.asymmetry = asymmetry


class PreconditionError(DomainError):
    """Raised when a point is not feasible for the spectrahedron it is tested against."""

    def __init__(self, message: str, report: Optional[Any] = None):
        super().__init__(message)
        self.report = report


class InfeasibleError(DomainError):
    """Raised when a solver's feasibility phase finds no feasible point."""

    def __init__(self, message: str, residuals: Optional[Any] = None):
        super().__init__(message)
        self.residuals = residuals


class NumericalError(DomainError):
    """Raised when a computed result fails the accuracy contract it is checked against."""

    def __init__(self, message: str, residual: Optional[float] = None):
        super().__init__(message)
        self.residual = residual


class ConvergenceError(SpectraForgeError):
    """Raised when the dense eigen-solver fails to converge."""

    def __init__(self, message: str, attempts: int):
        super().__init__(message)
        self.attempts = attempts


class FormatterError(SpectraForgeError):
    """Raised when output formatting fails."""
    pass


class ResourceNotFoundError(SpectraForgeError):
    """Raised when an input file is not found."""
    pass
