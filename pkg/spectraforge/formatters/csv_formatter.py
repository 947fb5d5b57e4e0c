"""CSV formatter: a lossy projection of reports."""

import csv
import io
import json
from pathlib import Path
from typing import Any, Dict, List, Optional

from .base import BaseFormatter


class CSVFormatter(BaseFormatter):
    """
    Formats reports as CSV.

    Solver reports (those with per-restart ``records``) give one row per
    restart; any other report gives a single row of its scalar fields. Nested
    values such as matrices are dropped.
    """

    def __init__(self, output_path: Optional[Path] = None,
                 delimiter: str = ',',
                 include_manifest: bool = True):
        """Initialize CSV formatter.

        Args:
            output_path: Output file path
            delimiter: CSV delimiter (default: comma)
            include_manifest: Write the command and version as comment lines
        """
        super().__init__(output_path)
        self.delimiter = delimiter
        self.include_manifest = include_manifest

    def format(self, report: Dict[str, Any]) -> str:
        self.validate_report(report)

        output = io.StringIO()
        if self.include_manifest:
            manifest = report["manifest"]
            output.write(f"# command: {manifest.get('command', '')}\n")
            output.write(f"# version: {manifest.get('version', '')}\n")
            output.write(f"# seeds: {json.dumps(manifest.get('seeds', {}), sort_keys=True)}\n")

        rows = self.rows(report["result"])
        headers = self._headers(rows)
        writer = csv.DictWriter(
            output,
            fieldnames=headers,
            delimiter=self.delimiter,
            quoting=csv.QUOTE_MINIMAL,
            lineterminator="\n"
        )
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
        return output.getvalue()

    def rows(self, result: Any) -> List[Dict[str, Any]]:
        """Flatten a result to CSV rows."""
        if not isinstance(result, dict):
            return [{"value": self.format_value(result)}]

        records = result.get("records")
        if isinstance(records, list) and records:
            shared = {f"best_{k}": v for k, v in self._scalars(result).items()}
            return [{**self._scalars(record), **shared} for record in records]

        outcomes = result.get("outcomes")
        if isinstance(outcomes, list) and outcomes:
            return [self._scalars(outcome) for outcome in outcomes]

        return [self._scalars(result)]

    def _scalars(self, data: Dict[str, Any]) -> Dict[str, Any]:
        row = {}
        for key, value in data.items():
            if isinstance(value, (dict, list)):
                continue
            row[key] = self.format_value(value)
        return row

    @staticmethod
    def _headers(rows: List[Dict[str, Any]]) -> List[str]:
        headers: List[str] = []
        for row in rows:
            for key in row:
                if key not in headers:
                    headers.append(key)
        return headers

    @staticmethod
    def format_value(value: Any) -> str:
        """Render a scalar; floats keep their round-trip representation."""
        if value is None:
            return ""
        if isinstance(value, bool):
            return "true" if value else "false"
        if isinstance(value, float):
            return repr(value)
        return str(value)
