"""Tests for settings and structured logging."""

import json
import logging

import pytest
from pydantic import ValidationError

from spectraforge.config import Settings, get_settings, settings
from spectraforge.logger import StructuredFormatter, get_logger, setup_logger


class TestSettings:

    def test_defaults(self):
        configured = Settings(_env_file=None)
        assert configured.feasibility_tol == 1e-8
        assert configured.witness_norm == 0.5
        assert configured.lambda1_restarts == 8
        assert configured.oracle_instances == 1000
        assert configured.entropy_max_iters == 500
        assert configured.entropy_snap_distance == 1e-6
        assert configured.null_space_rcond == 1e-10
        assert configured.witness_max_halvings == 20

    def test_environment_override(self, monkeypatch):
        monkeypatch.setenv("SPECTRAFORGE_FEASIBILITY_TOL", "1e-6")
        monkeypatch.setenv("SPECTRAFORGE_WORKERS", "4")
        configured = Settings(_env_file=None)
        assert configured.feasibility_tol == 1e-6
        assert configured.workers == 4

    @pytest.mark.parametrize("name, value", [
        ("feasibility_tol", 0.0),
        ("witness_norm", 1.5),
        ("penalty_initial", 1e9),
        ("entropy_max_iters", 0),
        ("entropy_snap_distance", 0.5),
        ("null_space_rcond", 0.0),
        ("witness_max_halvings", -1),
        ("log_level", "LOUD"),
    ])
    def test_rejects_out_of_range(self, name, value):
        with pytest.raises(ValidationError):
            Settings(_env_file=None, **{name: value})

    def test_global_instance(self):
        assert get_settings() is settings

    def test_tolerance_table(self):
        table = Settings(_env_file=None).tolerance_table()
        assert table["psd_tol"] == 1e-9
        assert table["rank_threshold"] == "n * eps * sigma_max"


class TestLogging:

    def test_structured_record_carries_extra_fields(self):
        record = logging.LogRecord("spectraforge.test", logging.INFO, __file__, 1, "rank %d", (3,), None)
        record.gram_rank = 3
        entry = json.loads(StructuredFormatter().format(record))
        assert entry["message"] == "rank 3"
        assert entry["level"] == "INFO"
        assert entry["gram_rank"] == 3

    def test_non_json_values_are_stringified(self):
        record = logging.LogRecord("spectraforge.test", logging.INFO, __file__, 1, "x", (), None)
        record.shape = {1, 2}
        entry = json.loads(StructuredFormatter().format(record))
        assert isinstance(entry["shape"], str)

    def test_get_logger_is_namespaced(self):
        assert get_logger("spectraforge.core").name == "spectraforge.core"
        assert get_logger("tests").name == "spectraforge.tests"
        assert get_logger().name == "spectraforge"

    def test_setup_logger_force_replaces_handlers(self):
        logger = setup_logger("spectraforge-test", level="DEBUG", log_format="simple", force=True)
        logger = setup_logger("spectraforge-test", level="INFO", force=True)
        assert len(logger.handlers) == 1
        assert logger.level == logging.INFO
        assert isinstance(logger.handlers[0].formatter, StructuredFormatter)
