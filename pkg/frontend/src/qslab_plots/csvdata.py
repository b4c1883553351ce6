"""Read-only access to the sweep/trajectory CSV files."""

from __future__ import annotations

import csv
import math

from .figspec import SpecError


class CsvTable:
    """Header plus rows; numeric cells parse lazily, empty cells become NaN."""

    def __init__(self, header: list[str], rows: list[dict]):
        self.header = header
        self.rows = rows

    def __len__(self) -> int:
        return len(self.rows)

    def column(self, name: str) -> list[float]:
        if name not in self.header:
            raise SpecError(f"column {name!r} not in CSV header {self.header}")
        out = []
        for row in self.rows:
            cell = row.get(name, "")
            if cell == "" or cell is None:
                out.append(math.nan)
            else:
                try:
                    out.append(float(cell))
                except ValueError:
                    out.append(math.nan)
        return out


def read_csv(path: str) -> CsvTable:
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            rows = list(reader)
    except OSError as exc:
        raise SpecError(f"cannot read CSV: {exc}") from exc
    if not rows:
        raise SpecError(f"{path}: CSV has no header row")
    header = rows[0]
    body = [dict(zip(header, r)) for r in rows[1:] if any(cell != "" for cell in r)]
    if not body:
        raise SpecError(f"{path}: CSV has no data rows")
    return CsvTable(header, body)
