"""JSON formatter, the reference rendering of every report."""

import json
from pathlib import Path
from typing import Any, Dict, Optional

from spectraforge.config import settings
from spectraforge.exceptions import FormatterError

from .base import BaseFormatter


class JSONFormatter(BaseFormatter):
    """Formats reports as JSON with sorted keys."""

    def __init__(self, output_path: Optional[Path] = None, indent: Optional[int] = None):
        super().__init__(output_path)
        self.indent = settings.output_indent if indent is None else indent

    def format(self, report: Dict[str, Any]) -> str:
        self.validate_report(report)
        try:
            # floats use repr, the shortest string that round-trips
            return json.dumps(report, indent=self.indent or None, sort_keys=True, allow_nan=False) + "\n"
        except (TypeError, ValueError) as e:
            raise FormatterError(f"Report is not JSON serializable: {e}") from e
