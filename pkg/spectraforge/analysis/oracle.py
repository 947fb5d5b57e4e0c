"""
Random comparison of the two extremality criteria.

Each instance draws a feasible point of a random spectrahedron, then runs the
Gram rank test and the null-space witness search on it. The verdicts must
agree; every witness must keep P +/- H feasible, have ||X|| at most the
configured witness norm and survive a Douglas factorization round trip; and
every point certified extreme must respect the rank bound for its constraint
count.
"""

from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field

from spectraforge.applications.lowrank import map_restarts
from spectraforge.config import settings
from spectraforge.core.elliptope import random_correlation
from spectraforge.core.extremality import (
    bp_rank_bound,
    douglas_factor,
    extremality_rank_test,
    find_even_perturbation,
)
from spectraforge.core.linalg import HermitianMatrix, trace_inner
from spectraforge.core.models import ScalarField
from spectraforge.core.spectrahedron import Spectrahedron, custom, density, elliptope
from spectraforge.exceptions import DomainError, NumericalError
from spectraforge.logger import get_logger

logger = get_logger(__name__)

WITNESS_NORM_SLACK = 1e-10
DOUGLAS_ROUND_TRIP_TOL = 1e-8
MAX_MIXTURE = 4


class InstanceFamily(str, Enum):
    """Random instance families, drawn in rotation."""
    ELLIPTOPE = "elliptope"
    DENSITY = "density"
    CUSTOM = "custom"


class InstanceOutcome(BaseModel):
    """Verdicts and witness checks for one random instance."""

    index: int
    seed: int
    family: InstanceFamily
    field: ScalarField
    n: int
    n_constraints: int
    rank_P: int
    rank_test_extreme: bool
    witness_found: bool
    agree: bool
    witness_valid: Optional[bool] = None
    witness_norm: Optional[float] = None
    douglas_error: Optional[float] = None
    bp_bound: int
    bp_ok: bool


class FamilyCount(BaseModel):
    total: int = 0
    agree: int = 0
    extreme: int = 0


class OracleSummary(BaseModel):
    """Agreement counts and failure lists, ordered by instance index."""

    instances: int
    base_seed: int
    max_dim: int
    families: Dict[str, FamilyCount] = Field(default_factory=dict)
    disagreements: List[int] = Field(default_factory=list)
    witness_failures: List[int] = Field(default_factory=list)
    bp_violations: List[int] = Field(default_factory=list)
    outcomes: List[InstanceOutcome] = Field(default_factory=list)

    @property
    def agreement_rate(self) -> float:
        return 1.0 - len(self.disagreements) / self.instances if self.instances else 1.0

    @property
    def passed(self) -> bool:
        return not (self.disagreements or self.witness_failures or self.bp_violations)


def _random_unit_vectors(rng: np.random.Generator, n: int, k: int, field: ScalarField) -> np.ndarray:
    v = rng.standard_normal((n, k))
    if field is ScalarField.COMPLEX:
        v = v + 1j * rng.standard_normal((n, k))
    return v / np.linalg.norm(v, axis=0, keepdims=True)


def density_mixture(
    n: int,
    k: int,
    field: ScalarField,
    rng: np.random.Generator
) -> HermitianMatrix:
    """A mixture of k random pure states with Dirichlet weights."""
    v = _random_unit_vectors(rng, n, k, field)
    weights = rng.dirichlet(np.ones(k))
    p = (v * weights) @ v.conj().T
    return HermitianMatrix.from_array(p, field, check=False)


def random_custom(
    n: int,
    field: ScalarField,
    rng: np.random.Generator
) -> Tuple[Spectrahedron, HermitianMatrix]:
    """Random Hermitian constraints whose targets are read off a random low-rank point."""
    rank = int(rng.integers(1, n + 1))
    v = _random_unit_vectors(rng, n, rank, field)
    weights = rng.dirichlet(np.ones(rank))
    point = HermitianMatrix.from_array((v * weights) @ v.conj().T, field, check=False)

    count = int(rng.integers(1, n * (n + 1) // 2 + 1))
    constraints = []
    for k in range(count):
        g = rng.standard_normal((n, n))
        if field is ScalarField.COMPLEX:
            g = g + 1j * rng.standard_normal((n, n))
        a = HermitianMatrix.from_array((g + g.conj().T) / 2.0, field, check=False)
        constraints.append((a, trace_inner(a, point), f"random_{k}"))
    return custom(constraints, field), point


def draw_instance(
    index: int,
    seed: int,
    max_dim: int
) -> Tuple[InstanceFamily, Spectrahedron, HermitianMatrix]:
    """The instance for ``index``; families rotate and everything else comes from ``seed``."""
    rng = np.random.default_rng(seed)
    family = list(InstanceFamily)[index % len(InstanceFamily)]
    field = ScalarField.COMPLEX if rng.integers(0, 2) else ScalarField.REAL
    n = int(rng.integers(2, max_dim + 1))

    if family is InstanceFamily.ELLIPTOPE:
        rank = int(rng.integers(1, n + 1))
        point = random_correlation(n, rank, field, seed=int(rng.integers(0, 2**31))).matrix
        return family, elliptope(n, field), point
    if family is InstanceFamily.DENSITY:
        k = int(rng.integers(1, min(MAX_MIXTURE, n) + 1))
        return family, density(n, field), density_mixture(n, k, field, rng)
    spectrahedron, point = random_custom(n, field, rng)
    return family, spectrahedron, point


def compare_instance(index: int, seed: int, max_dim: int) -> InstanceOutcome:
    """Run both criteria and the witness checks on one instance."""
    family, spectrahedron, point = draw_instance(index, seed, max_dim)
    report = extremality_rank_test(point, spectrahedron)
    witness = None
    # a nontrivial null space without a feasible witness still means "not extreme"
    search_failed = False
    try:
        witness = find_even_perturbation(point, spectrahedron)
    except NumericalError as e:
        search_failed = True
        logger.warning(f"Witness search failed on instance {index}: {e}")

    witness_valid: Optional[bool] = False if search_failed else None
    witness_norm: Optional[float] = None
    douglas_error: Optional[float] = None
    if witness is not None:
        witness_norm = witness.norm_X
        try:
            x = douglas_factor(point, witness.H)
            scale = max(witness.X.frobenius_norm, np.finfo(np.float64).tiny)
            douglas_error = float(np.linalg.norm(x.data - witness.X.data)) / scale
        except DomainError as e:
            logger.warning(f"Douglas factorization failed on instance {index}: {e}")
        witness_valid = (
            witness.is_valid
            and witness_norm <= settings.witness_norm + WITNESS_NORM_SLACK
            and douglas_error is not None
            and douglas_error <= DOUGLAS_ROUND_TRIP_TOL
        )

    bound = bp_rank_bound(len(spectrahedron), spectrahedron.field)
    return InstanceOutcome(
        index=index,
        seed=seed,
        family=family,
        field=spectrahedron.field,
        n=spectrahedron.n,
        n_constraints=len(spectrahedron),
        rank_P=report.rank_P,
        rank_test_extreme=report.is_extreme,
        witness_found=witness is not None,
        agree=report.is_extreme == (witness is None and not search_failed),
        witness_valid=witness_valid,
        witness_norm=witness_norm,
        douglas_error=douglas_error,
        bp_bound=bound,
        bp_ok=not report.is_extreme or report.rank_P <= bound
    )


def run_oracle_comparison(
    instances: Optional[int] = None,
    seed: Optional[int] = None,
    max_dim: Optional[int] = None,
    workers: Optional[int] = None
) -> OracleSummary:
    """
    Compare rank-test and witness verdicts over random instances.

    Instance i uses seed ``seed + i``; instances may run on a thread pool and
    the summary is ordered by instance index.
    """
    instances = settings.oracle_instances if instances is None else instances
    base = settings.default_seed if seed is None else seed
    max_dim = settings.oracle_max_dim if max_dim is None else max_dim
    workers = settings.workers if workers is None else workers

    outcomes = map_restarts(lambda index: compare_instance(index, base + index, max_dim), instances, workers)

    summary = OracleSummary(instances=instances, base_seed=base, max_dim=max_dim, outcomes=outcomes)
    for outcome in outcomes:
        count = summary.families.setdefault(outcome.family.value, FamilyCount())
        count.total += 1
        count.agree += int(outcome.agree)
        count.extreme += int(outcome.rank_test_extreme)
        if not outcome.agree:
            summary.disagreements.append(outcome.index)
        if outcome.witness_valid is False:
            summary.witness_failures.append(outcome.index)
        if not outcome.bp_ok:
            summary.bp_violations.append(outcome.index)

    logger.info(
        f"Oracle comparison: {instances} instances, {len(summary.disagreements)} disagreements",
        extra={
            "witness_failures": len(summary.witness_failures),
            "bp_violations": len(summary.bp_violations),
        }
    )
    return summary
