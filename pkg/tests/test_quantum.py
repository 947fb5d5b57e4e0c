"""Tests for the minimum-entropy moment study."""

import math

import numpy as np
import pytest

from spectraforge.applications.lowrank import SolverOptions
from spectraforge.applications.quantum import binary_entropy, min_entropy_rank2, moment_spectrahedron
from spectraforge.config import settings
from spectraforge.core.linalg import numerical_rank
from spectraforge.core.models import ScalarField
from spectraforge.core.spectrahedron import membership
from spectraforge.exceptions import ValidationError

# moments of the constant wave function, a pure state
UNIFORM_MOMENTS = [1 / 2, 1 / 3, 1 / 4]


class TestBinaryEntropy:

    @pytest.mark.parametrize("alpha", [0.0, 1.0])
    def test_endpoints(self, alpha):
        assert binary_entropy(alpha) == 0.0

    def test_half(self):
        assert binary_entropy(0.5) == pytest.approx(math.log(2.0))

    def test_symmetric(self):
        assert binary_entropy(0.2) == pytest.approx(binary_entropy(0.8))


class TestMomentSpectrahedron:

    def test_constraints(self):
        s = moment_spectrahedron(UNIFORM_MOMENTS, 6)
        assert len(s) == 4
        assert s.n == 6
        assert s.labels == ["trace", "moment_1", "moment_2", "moment_3"]
        np.testing.assert_allclose(s.targets, [1.0] + UNIFORM_MOMENTS)

    def test_constant_state_is_feasible(self):
        s = moment_spectrahedron(UNIFORM_MOMENTS, 6, ScalarField.COMPLEX)
        p = np.zeros((6, 6))
        p[0, 0] = 1.0
        assert membership(s, p).feasible


class TestMinEntropy:

    @pytest.mark.slow
    def test_uniform_moments_reach_a_pure_state(self):
        result = min_entropy_rank2(UNIFORM_MOMENTS, 8, SolverOptions(seed=0))
        assert result.entropy <= 1e-4
        assert max(abs(r) for r in result.residuals) <= 1e-6
        assert result.solve.converged
        assert result.solve.objective_kind == "upper_bound"
        assert numerical_rank(result.solve.P_opt).rank <= 2
        assert result.solve.membership.feasible

    def test_rank_one(self):
        result = min_entropy_rank2(UNIFORM_MOMENTS, 6, SolverOptions(restarts=2, seed=1), rank_one=True)
        assert result.alpha == 1.0
        assert result.entropy == 0.0
        assert result.solve.rank_bound_used == 1
        assert result.solve.membership.feasible
        assert np.linalg.norm(result.psi) == pytest.approx(1.0, abs=1e-8)

    def test_complex_field(self):
        options = SolverOptions(restarts=8, max_iters=200, seed=3)
        result = min_entropy_rank2([0.5, 0.3], 5, options, field=ScalarField.COMPLEX)
        assert 0.0 <= result.entropy <= math.log(2.0) + 1e-12
        assert result.solve.P_opt.field is ScalarField.COMPLEX
        assert np.iscomplexobj(result.psi)
        assert len(result.solve.records) == 8
        if result.solve.converged:
            assert result.solve.membership.feasible
            assert result.spectral_entropy == pytest.approx(result.entropy, abs=1e-6)

    def test_is_deterministic(self):
        options = SolverOptions(restarts=3, max_iters=100, seed=9)
        first = min_entropy_rank2([0.5, 0.3], 4, options)
        second = min_entropy_rank2([0.5, 0.3], 4, options.model_copy(update={"workers": 2}))
        assert first.alpha == second.alpha
        assert first.solve.best_restart == second.solve.best_restart
        np.testing.assert_array_equal(first.psi, second.psi)

    def test_to_dict(self):
        result = min_entropy_rank2(UNIFORM_MOMENTS, 4, SolverOptions(restarts=1, seed=2), rank_one=True)
        document = result.to_dict()
        assert document["objective_kind"] == "upper_bound"
        assert document["alpha"] == 1.0
        assert len(document["psi"]) == 4
        assert len(document["residuals"]) == len(result.residuals)

    def test_iteration_budget_comes_from_settings(self, monkeypatch):
        monkeypatch.setattr(settings, "entropy_max_iters", 2)
        result = min_entropy_rank2([0.5, 0.3], 4, SolverOptions(restarts=2, seed=4))
        assert all(record.iterations <= 2 * settings.penalty_rounds for record in result.solve.records)

    @pytest.mark.parametrize("moments, basis_size", [([0.5], 1), ([], 4)])
    def test_rejects_bad_parameters(self, moments, basis_size):
        with pytest.raises(ValidationError):
            min_entropy_rank2(moments, basis_size)
