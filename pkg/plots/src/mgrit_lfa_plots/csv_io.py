"""Reader for the experiment CSV schema.

Files start with a '#' comment block (the first line carries the
generation timestamp, the rest echo the config), then one header row, then
data rows. Floats are written with 17 significant digits, so float columns
round-trip exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class SchemaError(ValueError):
    """Input file missing or not matching the documented CSV schema."""


@dataclass
class Table:
    path: str
    comments: list[str]
    header: list[str]
    columns: dict

    def __len__(self) -> int:
        if not self.header:
            return 0
        first = self.columns[self.header[0]]
        return len(first)

    def column(self, name: str) -> np.ndarray:
        if name not in self.columns:
            raise SchemaError(f"{self.path}: missing column {name!r} "
                              f"(has {self.header})")
        return self.columns[name]


def read_table(path: str) -> Table:
    """Parse one CSV file into per-column arrays.

    Columns where every entry parses as a float become float arrays; other
    columns stay as string arrays.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            lines = [ln.rstrip("\n") for ln in fh]
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from None
    comments = [ln for ln in lines if ln.startswith("#")]
    data = [ln for ln in lines if ln and not ln.startswith("#")]
    if not data:
        raise SchemaError(f"{path}: no header row found")
    header = data[0].split(",")
    rows = [ln.split(",") for ln in data[1:]]
    for lineno, row in enumerate(rows, start=2):
        if len(row) != len(header):
            raise SchemaError(f"{path}: row {lineno} has {len(row)} fields, "
                              f"header has {len(header)}")
    columns: dict = {}
    for j, name in enumerate(header):
        raw = [row[j] for row in rows]
        try:
            columns[name] = np.array([float(v) for v in raw])
        except ValueError:
            columns[name] = np.array(raw)
    return Table(path=path, comments=comments, header=header, columns=columns)


def require_columns(table: Table, names) -> None:
    missing = [n for n in names if n not in table.columns]
    if missing:
        raise SchemaError(f"{table.path}: missing columns {missing} "
                          f"(has {table.header})")
