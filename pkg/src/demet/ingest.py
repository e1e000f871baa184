"""CSV ingestion and missing-value imputation.

Loads comma-separated text (double-quote escaping, mandatory header row,
UTF-8) into a typed column-oriented table. Cells are parsed per the declared
column kind; anything unparseable in a numeric column becomes a missing
marker (None) until imputation fills it.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

from .errors import ParseError, SchemaError
from .schema import Schema

MISSING_TOKEN = "MISSING"

Cell = float | str | None


@dataclass
class RawTable:
    """Column-oriented table of parsed cells, pre- or post-imputation.

    columns maps each schema column name to a vector of cells, where a cell
    is a float (numeric), a str token (categorical), or None (missing).
    metadata carries ingestion warnings:
      dropped_columns      file columns absent from the schema (dropped)
      all_missing_numeric  numeric columns that were entirely missing and
                           got zero-filled by impute()
    """

    schema: Schema
    columns: dict[str, list[Cell]]
    row_count: int
    metadata: dict = field(default_factory=dict)

    def column(self, name: str) -> list[Cell]:
        return self.columns[name]


def _parse_cell(cell: str, kind: str) -> Cell:
    if cell == "":
        return None
    if kind == "numeric":
        try:
            value = float(cell)
        except ValueError:
            return None
        # NaN/inf would poison means and bin edges; treat as missing.
        return value if math.isfinite(value) else None
    return cell


def load_csv(path: str, schema: Schema) -> RawTable:
    """Parse a delimited file into a RawTable per the schema.

    Every schema column must appear in the header; extra file columns are
    dropped and recorded in metadata. Rows whose width differs from the
    header raise ParseError with the offending line number.
    """
    wanted = {c.name: c for c in schema.columns}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: file is empty (no header row)")

        positions: dict[str, int] = {}
        for idx, name in enumerate(header):
            if name in wanted:
                if name in positions:
                    raise ParseError(f"{path}: duplicate header column {name!r}")
                positions[name] = idx
        missing = [name for name in wanted if name not in positions]
        if missing:
            raise SchemaError(
                f"{path}: header is missing schema column(s) {missing}"
            )
        dropped = [name for name in header if name not in wanted]

        columns: dict[str, list[Cell]] = {name: [] for name in wanted}
        width = len(header)
        row_count = 0
        for row in reader:
            if len(row) != width:
                raise ParseError(
                    f"{path}: line {reader.line_num}: expected {width} fields, "
                    f"got {len(row)}"
                )
            for name, spec in wanted.items():
                columns[name].append(_parse_cell(row[positions[name]], spec.kind))
            row_count += 1

    metadata = {"dropped_columns": dropped, "all_missing_numeric": []}
    return RawTable(schema=schema, columns=columns, row_count=row_count, metadata=metadata)


def impute(table: RawTable) -> RawTable:
    """Fill every missing cell; pure and idempotent.

    Numeric columns get the arithmetic mean of their non-missing cells; a
    numeric column with no observed values is zero-filled and flagged in
    metadata (downstream it bins to a single category, i.e. zero entropy).
    Categorical columns get the reserved MISSING token, which then behaves
    as an ordinary category.
    """
    filled: dict[str, list[Cell]] = {}
    flagged = list(table.metadata.get("all_missing_numeric", []))
    for spec in table.schema.columns:
        cells = table.columns[spec.name]
        if all(c is not None for c in cells):
            filled[spec.name] = list(cells)
            continue
        if spec.kind == "numeric":
            observed = [c for c in cells if c is not None]
            if observed:
                fill: Cell = sum(observed) / len(observed)
            else:
                fill = 0.0
                if spec.name not in flagged:
                    flagged.append(spec.name)
        else:
            fill = MISSING_TOKEN
        filled[spec.name] = [fill if c is None else c for c in cells]

    metadata = dict(table.metadata)
    metadata["all_missing_numeric"] = flagged
    return RawTable(
        schema=table.schema,
        columns=filled,
        row_count=table.row_count,
        metadata=metadata,
    )
