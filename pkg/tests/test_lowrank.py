"""Tests for the rank-bounded eigenvalue maximization."""

import numpy as np
import pytest

from spectraforge.applications.lowrank import (
    SolverOptions,
    map_restarts,
    max_lambda1_lowrank,
)
from spectraforge.applications.pca_cover import (
    IntervalCover,
    cover_basis,
    moments_from_covariance,
    pca_cover_constraints,
    rank_bound_summary,
)
from spectraforge.core.extremality import bp_rank_bound, extremality_rank_test
from spectraforge.core.linalg import numerical_rank
from spectraforge.core.models import ScalarField
from spectraforge.core.spectrahedron import custom, density, elliptope, membership
from spectraforge.exceptions import InfeasibleError, ShapeError, ValidationError

from .conftest import TRINE

FAST = SolverOptions(restarts=3, max_iters=120, seed=7)


def _check_solution(result, spectrahedron):
    assert membership(spectrahedron, result.P_opt, 1e-8).feasible
    assert numerical_rank(result.P_opt).rank <= result.rank_bound_used
    assert result.membership.feasible
    assert result.objective_kind == "lower_bound"
    assert len(result.records) == result.restarts


class TestMaxLambda1:

    def test_two_dimensional_elliptope(self):
        s = elliptope(2)
        result = max_lambda1_lowrank(s, 1, FAST)
        assert result.objective >= 2.0 - 1e-6
        np.testing.assert_allclose(np.abs(result.P_opt.data), np.ones((2, 2)), atol=1e-6)
        _check_solution(result, s)

    @pytest.mark.parametrize("field", [ScalarField.REAL, ScalarField.COMPLEX])
    def test_pure_states(self, field):
        s = density(4, field)
        result = max_lambda1_lowrank(s, 1, FAST)
        assert result.objective == pytest.approx(1.0, abs=1e-7)
        assert result.P_opt.field is field
        _check_solution(result, s)

    def test_feasible_start_is_a_lower_bound(self, trine):
        s = elliptope(3)
        result = max_lambda1_lowrank(s, 2, FAST, start=trine)
        assert result.objective >= 1.5 - 1e-9
        _check_solution(result, s)

    def test_start_as_factor(self):
        s = elliptope(3)
        result = max_lambda1_lowrank(s, 1, FAST, start=np.ones((3, 1)))
        assert result.records[0].objective == pytest.approx(3.0)
        assert result.objective == pytest.approx(3.0)

    @pytest.mark.parametrize("rank_bound", [1, 2, 3])
    def test_elliptope_maximum_is_n(self, rank_bound):
        # lambda_1 <= Tr P = 4, attained at the all-ones matrix
        s = elliptope(4)
        start = None if rank_bound == 1 else np.ones((4, 4))
        result = max_lambda1_lowrank(s, rank_bound, FAST, start=start)
        assert 4.0 - 1e-6 <= result.objective <= 4.0 + 1e-6
        _check_solution(result, s)

    def test_top_two_eigenvalues(self):
        s = density(3)
        result = max_lambda1_lowrank(s, 2, FAST, top_q=2)
        assert result.objective == pytest.approx(1.0, abs=1e-7)

    def test_restart_records(self):
        result = max_lambda1_lowrank(elliptope(3), 2, FAST)
        assert [record.seed for record in result.records] == [7, 8, 9]
        assert result.restart_objectives == [record.objective for record in result.records]
        assert result.objective == max(v for v in result.restart_objectives if v is not None)
        assert 0 <= result.best_restart < 3
        document = result.to_dict()
        assert document["objective_kind"] == "lower_bound"
        assert len(document["records"]) == 3

    def test_deterministic_across_workers(self):
        s = elliptope(4, ScalarField.COMPLEX)
        serial = max_lambda1_lowrank(s, 2, FAST)
        pooled = max_lambda1_lowrank(s, 2, FAST.model_copy(update={"workers": 3}))
        assert serial.objective == pooled.objective
        assert serial.best_restart == pooled.best_restart
        np.testing.assert_array_equal(serial.P_opt.data, pooled.P_opt.data)

    def test_extreme_outputs_respect_rank_bound(self):
        s = elliptope(5)
        result = max_lambda1_lowrank(s, 3, FAST)
        report = extremality_rank_test(result.P_opt, s)
        if report.is_extreme:
            assert report.rank_P <= bp_rank_bound(len(s), s.field)

    def test_infeasible_constraints(self):
        s = custom([(np.eye(2), -1.0)])
        with pytest.raises(InfeasibleError) as e:
            max_lambda1_lowrank(s, 1, SolverOptions(restarts=2, max_iters=10))
        assert len(e.value.residuals) == 2

    @pytest.mark.parametrize("rank_bound", [0, 4])
    def test_rejects_rank_bound(self, rank_bound):
        with pytest.raises(ValidationError):
            max_lambda1_lowrank(elliptope(3), rank_bound, FAST)

    def test_rejects_top_q(self):
        with pytest.raises(ValidationError):
            max_lambda1_lowrank(elliptope(3), 2, FAST, top_q=0)

    def test_rejects_start_above_rank_bound(self):
        with pytest.raises(ValidationError):
            max_lambda1_lowrank(elliptope(3), 1, FAST, start=TRINE)

    def test_rejects_start_of_wrong_shape(self):
        with pytest.raises(ShapeError):
            max_lambda1_lowrank(elliptope(3), 2, FAST, start=np.eye(2))


class TestPcaCoverStudy:

    def test_bound_reaches_planted_eigenvalue(self, rng):
        cover = IntervalCover.from_intervals([[0.0, 0.6], [0.4, 1.0]])
        p = 2
        basis = cover_basis(cover, p)
        v = rng.standard_normal((basis.size, 2))
        planted = v @ v.T
        trace_target, moments = moments_from_covariance(cover, p, planted)
        s = pca_cover_constraints(cover, p, trace_target, moments)
        summary = rank_bound_summary(cover, p)

        result = max_lambda1_lowrank(s, summary.closed_form_rank, FAST, start=planted)
        planted_lambda1 = float(np.linalg.eigvalsh(planted)[-1])
        assert result.objective >= planted_lambda1 - 1e-6
        assert result.rank_bound_used == summary.closed_form_rank == 3
        _check_solution(result, s)


class TestSolverOptions:

    def test_defaults_come_from_settings(self):
        options = SolverOptions()
        assert options.base_seed == 0
        assert options.feasibility_tol == 1e-8
        assert options.worker_count == 1

    def test_rejects_nonpositive_values(self):
        with pytest.raises(ValueError):
            SolverOptions(restarts=0)


def test_map_restarts_keeps_order():
    assert map_restarts(lambda i: i * i, 6, 3) == [0, 1, 4, 9, 16, 25]
    assert map_restarts(lambda i: -i, 3, 1) == [0, -1, -2]
