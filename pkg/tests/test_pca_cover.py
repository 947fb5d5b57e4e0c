"""Tests for the interval-cover PCA constraint sets."""

import math

import numpy as np
import pytest

from spectraforge.applications.pca_cover import (
    IntervalCover,
    cover_basis,
    moment_key,
    moments_from_covariance,
    pca_cover_constraints,
    rank_bound_summary,
    restricted_functions,
)
from spectraforge.core.extremality import bp_rank_bound
from spectraforge.core.models import ScalarField
from spectraforge.core.spectrahedron import membership
from spectraforge.exceptions import ShapeError, ValidationError

TWO_INTERVALS = [[0.0, 0.6], [0.4, 1.0]]


class TestIntervalCover:

    def test_breakpoints(self):
        cover = IntervalCover.from_intervals(TWO_INTERVALS)
        assert len(cover) == 2
        assert cover.breakpoints == [0.0, 0.4, 0.6, 1.0]

    @pytest.mark.parametrize("intervals", [
        [],
        [[0.0, 0.5]],
        [[0.1, 1.0]],
        [[0.0, 0.4], [0.5, 1.0]],
        [[0.4, 1.0], [0.0, 0.6]],
        [[0.0, 1.2]],
    ])
    def test_rejects_bad_covers(self, intervals):
        with pytest.raises(ValidationError):
            IntervalCover.from_intervals(intervals)


class TestRestrictedFunctions:

    def test_orthonormal_on_each_interval(self):
        cover = IntervalCover.from_intervals(TWO_INTERVALS)
        coefficients = restricted_functions(cover, 3)
        assert coefficients.shape == (2, 3, 9)
        for j in range(2):
            np.testing.assert_allclose(coefficients[j] @ coefficients[j].T, np.eye(3), atol=1e-12)

    def test_supported_on_their_interval(self):
        cover = IntervalCover.from_intervals(TWO_INTERVALS)
        coefficients = restricted_functions(cover, 2)
        # cells are [0, 0.4), [0.4, 0.6), [0.6, 1]; the first interval misses the last cell
        np.testing.assert_allclose(coefficients[0, :, 4:], 0.0, atol=1e-14)
        np.testing.assert_allclose(coefficients[1, :, :2], 0.0, atol=1e-14)

    def test_values_match_the_interval_legendre_functions(self):
        cover = IntervalCover.from_intervals(TWO_INTERVALS)
        coefficients = restricted_functions(cover, 2)
        basis = cover_basis(cover, 2)
        u = np.array([0.1, 0.5, 0.55])
        values = basis.evaluate(u) @ coefficients[0].T
        h = 0.6
        expected_first = np.full(3, 1.0 / math.sqrt(h))
        expected_second = math.sqrt(3.0 / h) * (2.0 * u / h - 1.0)
        np.testing.assert_allclose(values[:, 0], expected_first, atol=1e-12)
        np.testing.assert_allclose(values[:, 1], expected_second, atol=1e-12)


class TestConstraints:

    def test_single_interval_single_function(self):
        s = pca_cover_constraints([[0.0, 1.0]], 1, 2.0, {"0,0,0": 0.5})
        assert len(s) == 2
        assert s.n == 1
        assert s.labels == ["trace", "moment_0_0_0"]
        np.testing.assert_allclose(s.matrices[1].data, [[1.0]], atol=1e-14)
        np.testing.assert_array_equal(s.targets, [2.0, 0.5])
        assert s.field is ScalarField.REAL

    def test_two_intervals_two_functions(self):
        cover = IntervalCover.from_intervals(TWO_INTERVALS)
        moments = {moment_key(j, k, l): 0.0 for j in range(2) for k in range(2) for l in range(k, 2)}
        s = pca_cover_constraints(cover, 2, 1.0, moments)
        assert len(s) == 1 + 2 * 3
        assert bp_rank_bound(len(s), ScalarField.REAL) == 3

    def test_accepts_swapped_and_tuple_keys(self):
        moments = {(0, 0, 0): 1.0, "0,1,0": 0.2, (0, 1, 1): 0.5}
        s = pca_cover_constraints([[0.0, 1.0]], 2, 1.5, moments)
        np.testing.assert_allclose(s.targets, [1.5, 1.0, 0.2, 0.5])

    def test_missing_moment(self):
        with pytest.raises(ValidationError, match="0,0,1"):
            pca_cover_constraints([[0.0, 1.0]], 2, 1.0, {"0,0,0": 1.0, "0,1,1": 1.0})

    def test_rejects_zero_functions(self):
        with pytest.raises(ValidationError):
            pca_cover_constraints([[0.0, 1.0]], 0, 1.0, {})

    def test_planted_covariance_is_feasible(self, rng):
        cover = IntervalCover.from_intervals(TWO_INTERVALS)
        basis = cover_basis(cover, 2)
        v = rng.standard_normal((basis.size, 3))
        covariance = v @ v.T
        trace_target, moments = moments_from_covariance(cover, 2, covariance)
        assert trace_target == pytest.approx(np.trace(covariance))
        s = pca_cover_constraints(cover, 2, trace_target, moments)
        assert membership(s, covariance).feasible

    def test_brownian_covariance_is_feasible(self):
        cover = IntervalCover.from_intervals(TWO_INTERVALS)
        covariance = cover_basis(cover, 3).discretize_kernel(np.minimum)
        trace_target, moments = moments_from_covariance(cover, 3, covariance)
        assert membership(pca_cover_constraints(cover, 3, trace_target, moments), covariance).feasible

    def test_covariance_size_mismatch(self):
        with pytest.raises(ShapeError):
            moments_from_covariance(TWO_INTERVALS, 2, np.eye(4))


class TestRankBoundSummary:

    def test_two_intervals_two_functions(self):
        summary = rank_bound_summary(TWO_INTERVALS, 2)
        assert summary.unsymmetrized_count == 8
        assert summary.closed_form_bound == pytest.approx(math.sqrt(18.25) - 0.5)
        assert summary.closed_form_bound == pytest.approx(3.772, abs=1e-3)
        assert summary.closed_form_rank == 3
        assert summary.constraint_count == 7
        assert summary.count_rank_bound == 3

    @pytest.mark.parametrize("r, p", [(1, 1), (2, 3), (3, 2), (4, 4)])
    def test_closed_form_is_floored(self, r, p):
        intervals = [[0.0, 1.0]] * r
        summary = rank_bound_summary(intervals, p)
        assert summary.closed_form_rank == math.floor(math.sqrt(2 * r * p * p + 2.25) - 0.5)
        assert summary.count_rank_bound == bp_rank_bound(r * p * (p + 1) // 2 + 1, ScalarField.REAL)
