"""Validation utility functions."""

from typing import Any, Dict, Sequence

import jsonschema

from spectraforge.exceptions import ValidationError


def validate_json_schema(data: Any, schema: Dict[str, Any], what: str = "document") -> bool:
    """
    Validate data against a JSON schema.

    Args:
        data: Data to validate
        schema: JSON schema
        what: Name of the document used in error messages

    Returns:
        True if valid, raises ValidationError otherwise
    """
    try:
        jsonschema.validate(data, schema)
        return True
    except jsonschema.ValidationError as e:
        location = "/".join(str(part) for part in e.absolute_path) or "<root>"
        raise ValidationError(f"Invalid {what} at {location}: {e.message}")
    except jsonschema.SchemaError as e:
        raise ValidationError(f"Invalid JSON schema: {e.message}")


def validate_rows(rows: Sequence[Sequence[Any]], n: int) -> bool:
    """
    Check that a row-major matrix literal is n x n.

    Args:
        rows: Matrix rows
        n: Declared dimension

    Returns:
        True if valid, raises ValidationError otherwise
    """
    if len(rows) != n:
        raise ValidationError(f"Matrix declares n={n} but has {len(rows)} rows")
    for i, row in enumerate(rows):
        if len(row) != n:
            raise ValidationError(f"Row {i} has {len(row)} entries, expected {n}")
    return True


def validate_intervals(intervals: Sequence[Sequence[float]]) -> bool:
    """
    Check that intervals cover [0, 1] with consecutive overlaps.

    Args:
        intervals: (start, end) pairs sorted by start

    Returns:
        True if valid, raises ValidationError otherwise
    """
    if not intervals:
        raise ValidationError("At least one interval is required")
    for index, (start, end) in enumerate(intervals):
        if not 0.0 <= start < end <= 1.0:
            raise ValidationError(f"Interval {index} = [{start}, {end}] is not a subinterval of [0, 1]")
    if intervals[0][0] != 0.0 or max(end for _, end in intervals) != 1.0:
        raise ValidationError("Intervals must cover [0, 1]")
    for index in range(1, len(intervals)):
        previous, current = intervals[index - 1], intervals[index]
        if current[0] < previous[0]:
            raise ValidationError("Intervals must be sorted by their left endpoint")
        if current[0] >= previous[1]:
            raise ValidationError(
                f"Intervals {index - 1} and {index} do not overlap; the cover must be connected"
            )
    return True
