"""
Minimum-entropy states of a particle in a box with prescribed position moments.

Extreme points of {P density operator on L^2([0, 1]) : Tr(u^j P) = m_j, j = 1..J}
with J = 3 have rank at most 2, so the search runs over
P = alpha psi psi* + (1 - alpha) phi phi* with orthonormal psi, phi. Then
S(P) = -alpha log alpha - (1 - alpha) log(1 - alpha).

States are expanded in the first m shifted Legendre polynomials and the moment
operators are the Galerkin matrices of multiplication by u^j. The constraints
are enforced by a quadratic penalty whose weight doubles every round, then
polished by Gauss-Newton steps with alpha held fixed.
"""

from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg
import scipy.optimize
from scipy.special import entr

from spectraforge.applications.galerkin import galerkin_moment_operators
from spectraforge.applications.lowrank import RestartRecord, SolveResult, SolverOptions, map_restarts
from spectraforge.config import settings
from spectraforge.core.linalg import HermitianMatrix, von_neumann_entropy
from spectraforge.core.models import ScalarField
from spectraforge.core.spectrahedron import Spectrahedron, custom, membership
from spectraforge.exceptions import ValidationError
from spectraforge.logger import get_logger

logger = get_logger(__name__)

# real form of multiplication by i on (re, im) column pairs
_ROTATION = np.array([[0.0, -1.0], [1.0, 0.0]])


@dataclass
class EntropyResult:
    """Best rank-2 state with its decomposition."""

    solve: SolveResult
    alpha: float
    psi: np.ndarray
    phi: np.ndarray
    entropy: float
    spectral_entropy: float
    residuals: List[float]

    def to_dict(self) -> Dict[str, Any]:
        def coefficients(v: np.ndarray) -> List[Any]:
            if np.iscomplexobj(v):
                return [[float(z.real), float(z.imag)] for z in v]
            return [float(x) for x in v]

        result = self.solve.to_dict()
        result.update({
            "alpha": self.alpha,
            "psi": coefficients(self.psi),
            "phi": coefficients(self.phi),
            "entropy": self.entropy,
            "spectral_entropy": self.spectral_entropy,
            "residuals": list(self.residuals),
        })
        return result


def binary_entropy(alpha: float) -> float:
    """-alpha log alpha - (1 - alpha) log(1 - alpha), with 0 log 0 = 0."""
    return float(entr(alpha) + entr(1.0 - alpha))


def moment_spectrahedron(
    moments: Sequence[float],
    basis_size: int,
    field: Union[ScalarField, str] = ScalarField.REAL
) -> Spectrahedron:
    """{P >= 0 : Tr P = 1, Tr(M^(j) P) = m_j} in the first ``basis_size`` Legendre functions."""
    operators = galerkin_moment_operators(basis_size, list(range(1, len(moments) + 1)))
    constraints: List[Tuple[Any, float, str]] = [(np.eye(basis_size), 1.0, "trace")]
    for j, (operator, target) in enumerate(zip(operators, moments), start=1):
        constraints.append((operator, float(target), f"moment_{j}"))
    return custom(constraints, field)


class _PenaltyProblem:
    """Residuals and penalty objective over x = (theta, Psi, Phi) in real form."""

    def __init__(self, operators: List[np.ndarray], moments: np.ndarray, m: int, width: int, rank_one: bool):
        self.operators = operators
        self.moments = moments
        self.m = m
        self.width = width
        self.rank_one = rank_one

    def split(self, x: np.ndarray) -> Tuple[float, np.ndarray, np.ndarray]:
        size = self.m * self.width
        psi = x[1:1 + size].reshape(self.m, self.width)
        phi = x[1 + size:].reshape(self.m, self.width)
        return float(x[0]), psi, phi

    def residuals(self, alpha: float, psi: np.ndarray, phi: np.ndarray) -> np.ndarray:
        values = [
            alpha * np.sum(psi * (a @ psi)) + (1.0 - alpha) * np.sum(phi * (a @ phi)) - target
            for a, target in zip(self.operators, self.moments)
        ]
        values.extend([np.sum(psi * psi) - 1.0, np.sum(phi * phi) - 1.0, np.sum(psi * phi)])
        if self.width == 2:
            values.append(np.sum(psi * (phi @ _ROTATION)))
        return np.array(values)

    def jacobian(self, alpha: float, psi: np.ndarray, phi: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Derivatives of the residuals in alpha and in the flattened (Psi, Phi)."""
        d_alpha = []
        rows = []
        zero = np.zeros_like(psi)
        for a in self.operators:
            d_alpha.append(np.sum(psi * (a @ psi)) - np.sum(phi * (a @ phi)))
            rows.append((2.0 * alpha * (a @ psi), 2.0 * (1.0 - alpha) * (a @ phi)))
        d_alpha.extend([0.0, 0.0, 0.0])
        rows.extend([(2.0 * psi, zero), (zero, 2.0 * phi), (phi, psi)])
        if self.width == 2:
            d_alpha.append(0.0)
            rows.append((phi @ _ROTATION, psi @ _ROTATION.T))
        matrix = np.array([np.concatenate([g_psi.ravel(), g_phi.ravel()]) for g_psi, g_phi in rows])
        return np.array(d_alpha), matrix

    def objective(self, x: np.ndarray, weight: float) -> Tuple[float, np.ndarray]:
        theta, psi, phi = self.split(x)
        alpha = float(np.sin(theta) ** 2)
        res = self.residuals(alpha, psi, phi)
        d_alpha, jac = self.jacobian(alpha, psi, phi)

        value = binary_entropy(alpha) + weight * float(res @ res)
        grad = np.empty_like(x)
        d_theta = np.sin(2.0 * theta)
        entropy_slope = np.log((1.0 - alpha) / alpha) if 0.0 < alpha < 1.0 else 0.0
        grad[0] = (entropy_slope + 2.0 * weight * float(res @ d_alpha)) * d_theta
        grad[1:] = 2.0 * weight * (jac.T @ res)
        if self.rank_one:
            grad[0] = 0.0
        return value, grad

    def polish(
        self,
        alpha: float,
        psi: np.ndarray,
        phi: np.ndarray,
        tol: float,
        max_iters: int
    ) -> Tuple[np.ndarray, np.ndarray]:
        """Gauss-Newton on (Psi, Phi) with alpha fixed."""
        size = self.m * self.width
        for _ in range(max_iters):
            res = self.residuals(alpha, psi, phi)
            if float(np.max(np.abs(res))) <= tol / 10.0:
                break
            _, jac = self.jacobian(alpha, psi, phi)
            step, *_ = scipy.linalg.lstsq(jac, -res)
            psi = psi + step[:size].reshape(psi.shape)
            phi = phi + step[size:].reshape(phi.shape)
        return psi, phi


def _to_vector(block: np.ndarray) -> np.ndarray:
    if block.shape[1] == 2:
        return block[:, 0] + 1j * block[:, 1]
    return block[:, 0].copy()


@dataclass
class _EntropyOutcome:
    record: RestartRecord
    alpha: float
    psi: np.ndarray
    phi: np.ndarray
    residual: float


def min_entropy_rank2(
    moments: Sequence[float],
    basis_size: int,
    options: Optional[SolverOptions] = None,
    field: Union[ScalarField, str] = ScalarField.REAL,
    rank_one: bool = False
) -> EntropyResult:
    """
    Minimize the von Neumann entropy over rank-2 states with prescribed moments.

    Args:
        moments: m_1..m_J, the targets of int u^j (alpha |psi|^2 + (1 - alpha) |phi|^2) du
        basis_size: Number of Legendre functions the states are expanded in
        options: Restarts, iterations per penalty round, base seed, tolerance, workers
        field: Real or complex wave functions
        rank_one: Fix alpha = 1 (pure states only)

    Returns:
        EntropyResult: Lowest entropy among restarts meeting the tolerance; when none
        does, the one with the smallest residual, reported as not converged
    """
    options = options or SolverOptions()
    field = ScalarField(field)
    if basis_size < 2:
        raise ValidationError(f"Basis size must be at least 2, got {basis_size}")
    if len(moments) == 0:
        raise ValidationError("At least one moment is required")

    tol = options.feasibility_tol
    targets = np.asarray(moments, dtype=np.float64)
    operators = [
        op.data for op in galerkin_moment_operators(basis_size, list(range(1, len(targets) + 1)))
    ]
    width = 2 if field is ScalarField.COMPLEX else 1
    problem = _PenaltyProblem(operators, targets, basis_size, width, rank_one)

    restarts = settings.entropy_restarts if options.restarts is None else options.restarts
    max_iters = settings.entropy_max_iters if options.max_iters is None else options.max_iters
    base = options.base_seed

    def run(index: int) -> _EntropyOutcome:
        seed = base + index
        rng = np.random.default_rng(seed)
        theta = np.pi / 2.0 if rank_one else rng.uniform(0.0, np.pi / 2.0)
        # orthonormal start: two columns of a random orthogonal matrix
        q, _ = np.linalg.qr(rng.standard_normal((basis_size * width, 2)))
        x = np.concatenate([[theta], q[:, 0], q[:, 1]])

        weight = settings.penalty_initial
        iterations = 0
        for _ in range(settings.penalty_rounds):
            solution = scipy.optimize.minimize(
                problem.objective, x, args=(weight,), jac=True, method="BFGS",
                options={"maxiter": max_iters, "gtol": 1e-10}
            )
            x = solution.x
            iterations += int(solution.nit)
            weight *= 2.0

        theta, psi, phi = problem.split(x)
        alpha = 1.0 if rank_one else float(np.sin(theta) ** 2)
        if alpha < settings.entropy_snap_distance:
            alpha = 0.0
        elif alpha > 1.0 - settings.entropy_snap_distance:
            alpha = 1.0
        psi, phi = problem.polish(alpha, psi, phi, tol, settings.restoration_max_iters)
        residual = float(np.max(np.abs(problem.residuals(alpha, psi, phi))))

        converged = residual <= tol
        record = RestartRecord(
            index=index,
            seed=seed,
            objective=binary_entropy(alpha),
            final_residual=residual,
            iterations=iterations,
            converged=converged
        )
        logger.info(
            f"Entropy restart {index}: alpha={alpha:.6g}, residual={residual:.3e}",
            extra={"seed": seed, "converged": converged}
        )
        return _EntropyOutcome(record=record, alpha=alpha, psi=psi, phi=phi, residual=residual)

    outcomes = map_restarts(run, restarts, options.worker_count)

    feasible = [i for i, outcome in enumerate(outcomes) if outcome.record.converged]
    if feasible:
        best_index = min(feasible, key=lambda i: (outcomes[i].record.objective, i))
    else:
        best_index = min(range(len(outcomes)), key=lambda i: (outcomes[i].residual, i))
        logger.warning(
            "No entropy restart met the constraint tolerance",
            extra={"best_residual": outcomes[best_index].residual, "tol": tol}
        )
    best = outcomes[best_index]

    psi = _to_vector(best.psi)
    phi = _to_vector(best.phi)
    factor = np.column_stack([np.sqrt(best.alpha) * psi, np.sqrt(1.0 - best.alpha) * phi])
    p = HermitianMatrix.from_array(factor @ factor.conj().T, field, check=False)
    spectrahedron = moment_spectrahedron(targets, basis_size, field)
    report = membership(spectrahedron, p, tol)
    entropy = binary_entropy(best.alpha)

    solve = SolveResult(
        P_opt=p,
        factor=factor,
        objective=entropy,
        rank_bound_used=1 if rank_one else 2,
        restarts=restarts,
        converged=best.record.converged,
        membership=report,
        best_restart=best_index,
        records=[outcome.record for outcome in outcomes],
        objective_kind="upper_bound"
    )
    return EntropyResult(
        solve=solve,
        alpha=best.alpha,
        psi=psi,
        phi=phi,
        entropy=entropy,
        spectral_entropy=von_neumann_entropy(p),
        residuals=[float(r) for r in problem.residuals(best.alpha, best.psi, best.phi)]
    )
