#!/usr/bin/env python3
"""
Report manager module for nilcohom
Writes run reports, CSV artifacts and a SHA-256 manifest of everything written.
"""

import csv
import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence

import numpy as np

from modules.constants import MANIFEST_FILE, OUTPUT_DIR, REPORT_FILE
from modules.resource_manager import atomic_file_write, file_sha256


def _jsonable(value: Any) -> Any:
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    if isinstance(value, Path):
        return str(value)
    return str(value)


def format_value(value: Any, precision: int = 17) -> str:
    """Locale-free rendering; floats use repr-exact %.17g by default."""
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.{precision}g}"
    return str(value)


class ReportManager:
    """Manages report and artifact output for one run."""

    def __init__(self, output_dir: str = OUTPUT_DIR, precision: int = 17):
        """
        Initialize report manager.

        Args:
            output_dir: Path to the output directory
            precision: Significant digits for floats in CSV files
        """
        self.output_dir = Path(output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)
        self.precision = precision
        self.artifacts: List[Path] = []

    def save_report(self, report: Dict[str, Any], name: str = REPORT_FILE) -> Path:
        """Write the report as JSON with the caller's key order."""
        path = self.output_dir / name
        with atomic_file_write(path) as f:
            json.dump(report, f, indent=2, default=_jsonable)
            f.write("\n")
        self._track(path)
        return path

    def write_csv(self, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
        """
        Write a CSV artifact.

        Args:
            name: File name inside the output directory
            header: Column names
            rows: Row values; floats are formatted with the manager's precision

        Returns:
            Path of the written file
        """
        path = self.output_dir / name
        with atomic_file_write(path) as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([format_value(v, self.precision) for v in row])
        self._track(path)
        return path

    def write_manifest(self) -> Path:
        """Write manifest.json with the SHA-256 digest of every artifact."""
        manifest = [
            {"file": path.name, "sha256": file_sha256(path)}
            for path in sorted(self.artifacts)
            if path.exists()
        ]
        path = self.output_dir / MANIFEST_FILE
        with atomic_file_write(path) as f:
            json.dump(manifest, f, indent=2)
            f.write("\n")
        logging.debug(f"Manifest written with {len(manifest)} entries")
        return path

    def _track(self, path: Path) -> None:
        if path not in self.artifacts:
            self.artifacts.append(path)

    @staticmethod
    def format_text(report: Dict[str, Any], indent: int = 0) -> str:
        """Plain ``key: value`` lines in report order."""
        lines = []
        pad = "  " * indent
        for key, value in report.items():
            if isinstance(value, dict):
                lines.append(f"{pad}{key}:")
                lines.append(ReportManager.format_text(value, indent + 1))
            else:
                rendered = json.dumps(value, default=_jsonable) if isinstance(value, (list, tuple)) else format_value(value)
                lines.append(f"{pad}{key}: {rendered}")
        return "\n".join(line for line in lines if line)
