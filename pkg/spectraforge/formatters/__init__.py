"""Report formatters for different output formats."""

from spectraforge.constants import REPORT_FORMATS
from spectraforge.exceptions import FormatterError

from .base import BaseFormatter
from .csv_formatter import CSVFormatter
from .json_formatter import JSONFormatter


def get_formatter(name: str, **kwargs) -> BaseFormatter:
    """Formatter for a report format name."""
    if name == "json":
        return JSONFormatter(**kwargs)
    if name == "csv":
        return CSVFormatter(**kwargs)
    raise FormatterError(f"Unknown report format '{name}'; expected one of {', '.join(REPORT_FORMATS)}")


__all__ = ["BaseFormatter", "FormatterError", "CSVFormatter", "JSONFormatter", "get_formatter"]
