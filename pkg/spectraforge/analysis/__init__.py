"""Random comparison suite for the extremality criteria."""

from .oracle import InstanceOutcome, OracleSummary, run_oracle_comparison

__all__ = ["InstanceOutcome", "OracleSummary", "run_oracle_comparison"]
