"""Deterministic tabular output.

Floats are rendered in scientific notation with 9 significant digits,
locale independent, so byte-identical inputs give byte-identical CSV and
JSON artifacts.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Any


def fmt_float(value: float) -> str:
    """9-significant-digit scientific notation."""
    return f"{float(value):.8e}"


def _cell(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return fmt_float(value)
    return str(value)


@dataclass
class Table:
    """A named column set with mixed numeric/text cells."""

    name: str
    columns: list[str]
    rows: list[tuple] = field(default_factory=list)

    def add(self, *values) -> None:
        if len(values) != len(self.columns):
            raise ValueError(
                f"row width {len(values)} != {len(self.columns)} columns")
        self.rows.append(tuple(values))

    def column(self, name: str) -> list:
        k = self.columns.index(name)
        return [row[k] for row in self.rows]

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write(",".join(self.columns) + "\n")
        for row in self.rows:
            out.write(",".join(_cell(v) for v in row) + "\n")
        return out.getvalue()


def parse_csv(text: str) -> Table:
    """Re-parse an emitted CSV into a Table (numeric cells to float)."""
    lines = [ln for ln in text.splitlines() if ln]
    columns = lines[0].split(",")
    table = Table(name="parsed", columns=columns)
    for ln in lines[1:]:
        cells = []
        for cell in ln.split(","):
            try:
                cells.append(float(cell))
            except ValueError:
                cells.append(cell)
        table.add(*cells)
    return table


def json_ready(obj):
    """Recursively round floats to the canonical 9-digit representation."""
    if isinstance(obj, bool):
        return obj
    if isinstance(obj, float):
        return float(fmt_float(obj))
    if isinstance(obj, dict):
        return {k: json_ready(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [json_ready(v) for v in obj]
    try:
        import numpy as np
        if isinstance(obj, np.floating):
            return float(fmt_float(float(obj)))
        if isinstance(obj, np.integer):
            return int(obj)
        if isinstance(obj, np.ndarray):
            return [json_ready(v) for v in obj.tolist()]
    except ImportError:  # pragma: no cover
        pass
    return obj
