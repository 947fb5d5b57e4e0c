"""Tests for the command-line interface."""

import json

import numpy as np
import pytest

from spectraforge import __version__
from spectraforge.cli import cli
from spectraforge.constants import EXIT_DOMAIN, EXIT_OK, EXIT_USAGE, SUBCOMMANDS
from spectraforge.parser import decode_matrix, encode_matrix

from .conftest import TRINE

ELLIPTOPE_3 = {"kind": "elliptope", "n": 3, "field": "real"}


@pytest.fixture
def elliptope_files(write_document):
    def files(point):
        return (
            str(write_document("spectrahedron.json", ELLIPTOPE_3)),
            str(write_document("point.json", encode_matrix(np.asarray(point, dtype=float)))),
        )
    return files


def _report(result):
    assert result.exit_code == EXIT_OK, result.stderr
    return json.loads(result.stdout)


class TestGroup:

    def test_version(self, runner):
        result = runner.invoke(cli, ["--version"])
        document = _report(result)
        assert document["version"] == __version__
        assert document["tolerances"]["feasibility_tol"] == 1e-8

    def test_every_subcommand_is_registered(self):
        assert set(SUBCOMMANDS) <= set(cli.commands)

    def test_unknown_command(self, runner):
        result = runner.invoke(cli, ["no-such-command"])
        assert result.exit_code == EXIT_USAGE

    def test_missing_required_option(self, runner):
        result = runner.invoke(cli, ["bp-bound"])
        assert result.exit_code == EXIT_USAGE

    def test_info(self, runner):
        result = runner.invoke(cli, ["info"])
        assert result.exit_code == EXIT_OK
        assert "feasibility_tol" in result.stdout


class TestExtremalityCommands:

    def test_all_ones_is_extreme(self, runner, elliptope_files):
        spectrahedron, point = elliptope_files(np.ones((3, 3)))
        report = _report(runner.invoke(cli, ["check-extreme", "--spectrahedron", spectrahedron, "--point", point]))
        assert report["manifest"]["command"] == "check-extreme"
        assert report["manifest"]["inputs"]["point"] == point
        assert report["result"]["is_extreme"] is True
        assert report["result"]["rank_P"] == 1

    def test_facial_dimension(self, runner, elliptope_files):
        spectrahedron, point = elliptope_files(np.eye(3))
        report = _report(runner.invoke(cli, ["facial-dim", "--spectrahedron", spectrahedron, "--point", point]))
        assert report["result"]["facial_dimension"] == 3

    def test_perturb_identity(self, runner, elliptope_files):
        spectrahedron, point = elliptope_files(np.eye(3))
        report = _report(runner.invoke(cli, ["perturb", "--spectrahedron", spectrahedron, "--point", point]))
        assert report["result"]["is_extreme"] is False
        h = decode_matrix(report["result"]["witness"]["H"]).data
        np.testing.assert_allclose(np.diag(h), 0.0, atol=1e-12)
        assert np.linalg.eigvalsh(np.eye(3) - h)[0] >= -1e-12

    def test_perturb_trine(self, runner, elliptope_files):
        spectrahedron, point = elliptope_files(TRINE)
        report = _report(runner.invoke(cli, ["perturb", "--spectrahedron", spectrahedron, "--point", point]))
        assert report["result"] == {"is_extreme": True, "witness": None}

    def test_infeasible_point_is_a_domain_error(self, runner, elliptope_files):
        spectrahedron, point = elliptope_files(2.0 * np.eye(3))
        result = runner.invoke(cli, ["check-extreme", "--spectrahedron", spectrahedron, "--point", point])
        assert result.exit_code == EXIT_DOMAIN
        assert result.stdout == ""

    def test_missing_file(self, runner, tmp_path, elliptope_files):
        spectrahedron, _ = elliptope_files(np.eye(3))
        result = runner.invoke(
            cli, ["check-extreme", "--spectrahedron", spectrahedron, "--point", str(tmp_path / "absent.json")]
        )
        assert result.exit_code == EXIT_USAGE

    def test_csv_format(self, runner, elliptope_files):
        spectrahedron, point = elliptope_files(TRINE)
        result = runner.invoke(
            cli, ["check-extreme", "--spectrahedron", spectrahedron, "--point", point, "--format", "csv"]
        )
        assert result.exit_code == EXIT_OK
        lines = [line for line in result.stdout.splitlines() if not line.startswith("#")]
        row = dict(zip(lines[0].split(","), lines[1].split(",")))
        assert row["is_extreme"] == "true"
        assert row["gram_rank"] == "3"

    def test_out_file(self, runner, tmp_path, elliptope_files):
        spectrahedron, point = elliptope_files(TRINE)
        out = tmp_path / "report.json"
        result = runner.invoke(
            cli, ["elliptope-check", "--point", point, "--out", str(out)]
        )
        assert result.exit_code == EXIT_OK
        assert result.stdout == ""
        assert json.loads(out.read_text())["result"]["is_extreme"] is True

    def test_douglas_factor(self, runner, write_document):
        point = str(write_document("p.json", encode_matrix(np.eye(2))))
        h = str(write_document("h.json", encode_matrix(np.array([[0.0, 0.5], [0.5, 0.0]]))))
        report = _report(runner.invoke(cli, ["douglas-factor", "--point", point, "--perturbation", h]))
        np.testing.assert_allclose(decode_matrix(report["result"]["X"]).data, [[0.0, 0.5], [0.5, 0.0]], atol=1e-12)
        assert report["result"]["norm_X"] == pytest.approx(0.5)

    def test_douglas_factor_outside_the_range(self, runner, write_document):
        point = str(write_document("p.json", encode_matrix(np.diag([1.0, 0.0]))))
        h = str(write_document("h.json", encode_matrix(np.array([[0.0, 1e-5], [1e-5, 0.0]]))))
        result = runner.invoke(cli, ["douglas-factor", "--point", point, "--perturbation", h])
        assert result.exit_code == EXIT_DOMAIN
        assert result.stdout == ""

    def test_hadamard_check(self, runner, write_document):
        matrix = str(write_document("a.json", encode_matrix(np.eye(3))))
        report = _report(runner.invoke(cli, ["hadamard-check", "--matrix", matrix]))
        assert report["result"]["lhs_rank"] == 3
        assert report["result"]["equality"] is False


class TestUtilityCommands:

    @pytest.mark.parametrize("args, expected", [
        (["--constraints", "4", "--field", "complex"], 2),
        (["--constraints", "6"], 3),
        (["--constraints", "0"], 0),
    ])
    def test_bp_bound(self, runner, args, expected):
        report = _report(runner.invoke(cli, ["bp-bound", *args]))
        assert report["result"]["max_rank"] == expected

    def test_random_correlation(self, runner):
        report = _report(runner.invoke(cli, ["random-correlation", "--n", "4", "--rank", "2", "--seed", "3"]))
        matrix = decode_matrix(report["result"]["matrix"]).data
        np.testing.assert_allclose(np.diag(matrix), 1.0)
        assert report["result"]["rank"] <= 2
        assert report["manifest"]["seeds"] == {"seed": 3}

    def test_reports_are_reproducible(self, runner):
        args = ["random-correlation", "--n", "5", "--rank", "3", "--field", "complex", "--seed", "8"]
        first = _report(runner.invoke(cli, args))
        second = _report(runner.invoke(cli, args))
        for report in (first, second):
            report["manifest"].pop("duration_seconds")
        assert first == second

    def test_random_correlation_rank_too_large(self, runner):
        result = runner.invoke(cli, ["random-correlation", "--n", "2", "--rank", "3"])
        assert result.exit_code == EXIT_USAGE


class TestSolverCommands:

    def test_solve_lambda1_on_spectrahedron(self, runner, write_document):
        path = str(write_document("s.json", {"kind": "elliptope", "n": 2, "field": "real"}))
        report = _report(runner.invoke(
            cli, ["solve-lambda1", "--problem", path, "--rank-bound", "1", "--restarts", "2", "--seed", "5"]
        ))
        assert report["result"]["objective"] >= 2.0 - 1e-6
        assert report["result"]["objective_kind"] == "lower_bound"
        assert report["manifest"]["seeds"] == {"base_seed": 5}

    def test_solve_lambda1_on_pca_problem(self, runner, write_document):
        path = str(write_document("pca.json", {
            "study": "pca_cover",
            "intervals": [[0.0, 0.6], [0.4, 1.0]],
            "p": 1,
            "planted": encode_matrix(np.diag([1.0, 0.0, 0.0])),
            "solver": {"restarts": 2, "max_iters": 50},
        }))
        report = _report(runner.invoke(cli, ["solve-lambda1", "--problem", path]))
        assert report["result"]["rank_bounds"]["constraint_count"] == 3
        assert report["result"]["objective"] >= report["result"]["planted_objective"] - 1e-6

    def test_solve_lambda1_rejects_entropy_problem(self, runner, write_document):
        path = str(write_document("q.json", {"study": "quantum_moments", "moments": [0.5], "basis_size": 3}))
        result = runner.invoke(cli, ["solve-lambda1", "--problem", path])
        assert result.exit_code == EXIT_USAGE

    def test_solve_entropy_from_flags(self, runner):
        report = _report(runner.invoke(cli, [
            "solve-entropy", "--moments", "0.5,0.3333333333333333", "--basis-size", "4",
            "--rank-one", "--restarts", "1",
        ]))
        assert report["result"]["alpha"] == 1.0
        assert report["result"]["objective_kind"] == "upper_bound"

    def test_solve_entropy_needs_moments(self, runner):
        result = runner.invoke(cli, ["solve-entropy", "--basis-size", "4"])
        assert result.exit_code == EXIT_USAGE

    def test_oracle_compare(self, runner):
        report = _report(runner.invoke(cli, ["oracle-compare", "--instances", "9", "--max-dim", "4"]))
        assert report["result"]["instances"] == 9
        assert report["result"]["agreement_rate"] == 1.0
        assert "outcomes" not in report["result"]
