"""Base formatter class for report output formats."""

from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Dict, Optional

from spectraforge.exceptions import FormatterError


class BaseFormatter(ABC):
    """Abstract base class for report formatters."""

    def __init__(self, output_path: Optional[Path] = None):
        """Initialize formatter.

        Args:
            output_path: Optional output file path
        """
        self.output_path = output_path

    @abstractmethod
    def format(self, report: Dict[str, Any]) -> str:
        """Format a report envelope.

        Args:
            report: ``{"manifest": ..., "result": ...}``

        Returns:
            Formatted output as string
        """
        pass

    def write(self, report: Dict[str, Any]) -> None:
        """Write formatted output to file.

        Args:
            report: Report to format and write

        Raises:
            FormatterError: If writing fails
        """
        if not self.output_path:
            raise FormatterError("No output path specified")

        formatted = self.format(report)
        try:
            self.output_path.write_text(formatted, encoding="utf-8")
        except OSError as e:
            raise FormatterError(f"Failed to write output: {e}") from e

    def validate_report(self, report: Dict[str, Any]) -> None:
        """Validate the report envelope.

        Raises:
            FormatterError: If validation fails
        """
        if not isinstance(report, dict):
            raise FormatterError("Report must be a dictionary")
        for key in ("manifest", "result"):
            if key not in report:
                raise FormatterError(f"Report must have a '{key}' key")
        if not isinstance(report["manifest"], dict) or "command" not in report["manifest"]:
            raise FormatterError("Report manifest must name its command")
