"""
Rank-bounded maximization of the largest eigenvalue over a spectrahedron.

The search runs over factors V (n x k) with P = V V*, so every iterate is PSD
with rank at most k. Each step follows the subgradient 2 U U* V of the sum of
the q largest eigenvalues, projected onto the tangent space of the constraints
Re Tr(A_j V V*) = c_j, with step size c / sqrt(iteration). Every block of
iterations the factor is pulled back onto the constraint set by Gauss-Newton
steps of the form V <- V + sum_l y_l A_l V.

The value returned is the best objective seen at a feasible iterate: a lower
bound on the maximum, not a certified optimum.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, TypeVar

import numpy as np
import scipy.linalg
from pydantic import BaseModel, Field

from spectraforge.config import settings
from spectraforge.core.linalg import HermitianMatrix, as_hermitian, range_factor
from spectraforge.core.models import MembershipReport, ScalarField
from spectraforge.core.spectrahedron import Spectrahedron, membership
from spectraforge.exceptions import InfeasibleError, ShapeError, ValidationError
from spectraforge.logger import get_logger
from spectraforge.parser.codec import encode_matrix

logger = get_logger(__name__)

T = TypeVar("T")


class SolverOptions(BaseModel):
    """Solver knobs; ``None`` falls back to the matching setting."""

    restarts: Optional[int] = Field(None, ge=1)
    max_iters: Optional[int] = Field(None, ge=1)
    step_scale: Optional[float] = Field(None, gt=0.0)
    seed: Optional[int] = Field(None, ge=0)
    tol: Optional[float] = Field(None, gt=0.0)
    workers: Optional[int] = Field(None, ge=1)

    @property
    def base_seed(self) -> int:
        return settings.default_seed if self.seed is None else self.seed

    @property
    def feasibility_tol(self) -> float:
        return settings.feasibility_tol if self.tol is None else self.tol

    @property
    def worker_count(self) -> int:
        return settings.workers if self.workers is None else self.workers


class RestartRecord(BaseModel):
    """Outcome of one restart."""

    index: int
    seed: int
    objective: Optional[float] = Field(None, description="Best feasible objective, None if never feasible")
    final_residual: float = Field(..., description="Max scaled constraint residual at the last iterate")
    iterations: int
    converged: bool


@dataclass
class SolveResult:
    """Best point over all restarts with its membership report."""

    P_opt: HermitianMatrix
    factor: np.ndarray
    objective: float
    rank_bound_used: int
    restarts: int
    converged: bool
    membership: MembershipReport
    best_restart: int
    records: List[RestartRecord] = field(default_factory=list)
    objective_kind: str = "lower_bound"

    @property
    def restart_objectives(self) -> List[Optional[float]]:
        return [record.objective for record in self.records]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "P_opt": encode_matrix(self.P_opt),
            "objective": self.objective,
            "objective_kind": self.objective_kind,
            "rank_bound_used": self.rank_bound_used,
            "restarts": self.restarts,
            "converged": self.converged,
            "best_restart": self.best_restart,
            "membership": self.membership.model_dump(mode="json"),
            "records": [record.model_dump(mode="json") for record in self.records],
        }


def map_restarts(run: Callable[[int], T], count: int, workers: int) -> List[T]:
    """Run independent restarts, on a thread pool when workers > 1; results keep index order."""
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(run, range(count)))
    return [run(index) for index in range(count)]


def _flatten(v: np.ndarray) -> np.ndarray:
    if np.iscomplexobj(v):
        return np.concatenate([v.real.ravel(), v.imag.ravel()])
    return v.ravel()


def _unflatten(x: np.ndarray, shape: tuple, complex_field: bool) -> np.ndarray:
    if complex_field:
        size = shape[0] * shape[1]
        return (x[:size] + 1j * x[size:]).reshape(shape)
    return x.reshape(shape)


class _ConstraintMap:
    """Constraint data of a spectrahedron in the form the factor iterations use."""

    def __init__(self, spectrahedron: Spectrahedron):
        self.matrices = [a.data for a in spectrahedron.matrices]
        self.targets = spectrahedron.targets
        self.scales = np.array([c.scale for c in spectrahedron.constraints])
        self.complex_field = spectrahedron.field is ScalarField.COMPLEX

    def residuals(self, v: np.ndarray) -> np.ndarray:
        values = [np.real(np.vdot(v, a @ v)) for a in self.matrices]
        return np.array(values) - self.targets

    def scaled_residual(self, v: np.ndarray) -> float:
        return float(np.max(np.abs(self.residuals(v)) / self.scales)) if self.matrices else 0.0

    def restore(self, v: np.ndarray, tol: float, max_iters: int) -> np.ndarray:
        """Gauss-Newton pull-back onto Re Tr(A_j V V*) = c_j."""
        for _ in range(max_iters):
            r = self.residuals(v)
            if float(np.max(np.abs(r) / self.scales)) <= tol / 10.0:
                break
            directions = [a @ v for a in self.matrices]
            k = np.array([
                [2.0 * np.real(np.vdot(di, dj)) for dj in directions] for di in directions
            ])
            y, *_ = scipy.linalg.lstsq(k, -r)
            v = v + sum(coefficient * d for coefficient, d in zip(y, directions))
        return v

    def project_tangent(self, v: np.ndarray, direction: np.ndarray) -> np.ndarray:
        """Remove the components of ``direction`` along the constraint gradients 2 A_j V."""
        if not self.matrices:
            return direction
        jacobian = np.column_stack([_flatten(2.0 * (a @ v)) for a in self.matrices])
        d = _flatten(direction)
        y, *_ = scipy.linalg.lstsq(jacobian, d)
        return _unflatten(d - jacobian @ y, v.shape, self.complex_field)


def _top_sum(v: np.ndarray, q: int) -> float:
    mu = scipy.linalg.eigvalsh(v.conj().T @ v)
    return float(np.sum(mu[::-1][:q]))


def _ascent_direction(v: np.ndarray, q: int) -> np.ndarray:
    # top eigenvectors of V V* are V w / sqrt(mu) for eigenpairs (mu, w) of V* V
    mu, w = scipy.linalg.eigh(v.conj().T @ v)
    mu, w = mu[::-1][:q], w[:, ::-1][:, :q]
    keep = mu > 0
    u = (v @ w[:, keep]) / np.sqrt(mu[keep])
    return 2.0 * u @ (u.conj().T @ v)


def _initial_factor(rng: np.random.Generator, n: int, k: int, complex_field: bool) -> np.ndarray:
    v = rng.standard_normal((n, k))
    if complex_field:
        v = v + 1j * rng.standard_normal((n, k))
    return v / np.sqrt(n)


def _start_factor(start: Any, n: int, k: int, complex_field: bool) -> np.ndarray:
    array = np.asarray(start.data if isinstance(start, HermitianMatrix) else start)
    if array.shape == (n, k) and not isinstance(start, HermitianMatrix):
        return array.astype(np.complex128 if complex_field else np.float64)
    if array.shape != (n, n):
        raise ShapeError(f"Start must be an {n} x {k} factor or an {n} x {n} PSD matrix")
    factor = range_factor(as_hermitian(array))
    if factor.rank > k:
        raise ValidationError(f"Start has rank {factor.rank}, above the rank bound {k}")
    v = np.zeros((n, k), dtype=np.complex128 if complex_field else np.float64)
    block = factor.eigenvectors * np.sqrt(factor.eigenvalues)
    v[:, :factor.rank] = block if complex_field else np.real(block)
    return v


@dataclass
class _RestartOutcome:
    record: RestartRecord
    best_factor: Optional[np.ndarray]


def _run_restart(
    constraints: _ConstraintMap,
    n: int,
    k: int,
    q: int,
    index: int,
    seed: int,
    options: SolverOptions,
    initial: Optional[np.ndarray]
) -> _RestartOutcome:
    tol = options.feasibility_tol
    max_iters = settings.lambda1_max_iters if options.max_iters is None else options.max_iters
    step_scale = settings.lambda1_step_scale if options.step_scale is None else options.step_scale
    block = settings.restoration_block
    restore_iters = settings.restoration_max_iters

    rng = np.random.default_rng(seed)
    v = initial if initial is not None else _initial_factor(rng, n, k, constraints.complex_field)

    best: Optional[float] = None
    best_factor: Optional[np.ndarray] = None
    last_block_best: Optional[float] = None

    def consider(candidate: np.ndarray) -> None:
        nonlocal best, best_factor
        if constraints.scaled_residual(candidate) > tol:
            return
        value = _top_sum(candidate, q)
        if best is None or value > best:
            best, best_factor = value, candidate.copy()

    if initial is not None:
        consider(v)
    v = constraints.restore(v, tol, restore_iters)
    consider(v)

    iterations = 0
    converged = False
    for iteration in range(1, max_iters + 1):
        iterations = iteration
        direction = constraints.project_tangent(v, _ascent_direction(v, q))
        norm = float(np.linalg.norm(direction))
        if norm == 0.0:
            converged = True
            break
        step = step_scale / np.sqrt(iteration) * float(np.linalg.norm(v)) / norm
        v = v + step * direction

        if iteration % block == 0 or iteration == max_iters:
            v = constraints.restore(v, tol, restore_iters)
            consider(v)
            if best is not None and last_block_best is not None:
                if best - last_block_best <= tol * max(1.0, abs(best)):
                    converged = True
                    break
            last_block_best = best

    record = RestartRecord(
        index=index,
        seed=seed,
        objective=best,
        final_residual=constraints.scaled_residual(v),
        iterations=iterations,
        converged=converged
    )
    logger.info(
        f"Restart {index}: objective={best}, iterations={iterations}",
        extra={"seed": seed, "converged": converged}
    )
    return _RestartOutcome(record=record, best_factor=best_factor)


def max_lambda1_lowrank(
    spectrahedron: Spectrahedron,
    rank_bound: int,
    options: Optional[SolverOptions] = None,
    top_q: int = 1,
    start: Any = None
) -> SolveResult:
    """
    Maximize the sum of the ``top_q`` largest eigenvalues of P = V V* over the spectrahedron.

    Args:
        spectrahedron: Constraint set
        rank_bound: Column count k of the factor V
        options: Restarts, iterations, step constant, base seed, tolerance, workers
        top_q: Number of leading eigenvalues summed (1 gives lambda_1)
        start: Optional feasible start, an n x k factor or a PSD matrix of rank <= k;
            it runs as restart 0 and its value counts toward the best

    Returns:
        SolveResult: Best feasible point over all restarts (ties to the lowest index)

    Raises:
        ValidationError: If rank_bound or top_q is out of range
        InfeasibleError: If no restart reaches a feasible point
    """
    options = options or SolverOptions()
    n = spectrahedron.n
    if not 1 <= rank_bound <= n:
        raise ValidationError(f"Rank bound must lie in 1..{n}, got {rank_bound}")
    if top_q < 1:
        raise ValidationError(f"top_q must be at least 1, got {top_q}")

    constraints = _ConstraintMap(spectrahedron)
    q = min(top_q, rank_bound)
    restarts = settings.lambda1_restarts if options.restarts is None else options.restarts
    base = options.base_seed
    initial = (
        _start_factor(start, n, rank_bound, constraints.complex_field) if start is not None else None
    )

    def run(index: int) -> _RestartOutcome:
        return _run_restart(
            constraints, n, rank_bound, q, index, base + index, options,
            initial if index == 0 else None
        )

    outcomes = map_restarts(run, restarts, options.worker_count)

    best_index: Optional[int] = None
    for index, outcome in enumerate(outcomes):
        value = outcome.record.objective
        if value is None:
            continue
        if best_index is None or value > outcomes[best_index].record.objective:
            best_index = index

    records = [outcome.record for outcome in outcomes]
    if best_index is None:
        raise InfeasibleError(
            f"No feasible point found in {restarts} restarts",
            [record.final_residual for record in records]
        )

    v = outcomes[best_index].best_factor
    p = HermitianMatrix.from_array(v @ v.conj().T, spectrahedron.field, check=False)
    report = membership(spectrahedron, p, options.feasibility_tol)
    return SolveResult(
        P_opt=p,
        factor=v,
        objective=float(records[best_index].objective),
        rank_bound_used=rank_bound,
        restarts=restarts,
        converged=records[best_index].converged,
        membership=report,
        best_restart=best_index,
        records=records
    )
