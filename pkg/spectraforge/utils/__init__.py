"""Utility functions for spectraforge."""

from .validators import validate_intervals, validate_json_schema, validate_rows

__all__ = [
    "validate_json_schema",
    "validate_rows",
    "validate_intervals",
]
