"""Column schema declarations and their JSON representation.

A schema names every column the pipeline should read and declares its role
(feature, label, ignore) and kind (numeric, categorical). Schemas are loaded
from a small JSON document and validated strictly: unknown keys are rejected
so typos fail loudly instead of silently dropping a column.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import dataclass, field

from .errors import ParseError, SchemaError

ROLES = ("feature", "label", "ignore")
KINDS = ("numeric", "categorical")

# Default fill policy per column kind; see ingest.impute.
_DEFAULT_POLICY = {"numeric": "mean", "categorical": "missing_category"}


@dataclass(frozen=True)
class ColumnSpec:
    """Declaration of a single column: identity, role, kind, fill policy."""

    name: str
    role: str
    kind: str
    missing_policy: str = ""

    def __post_init__(self):
        if self.role not in ROLES:
            raise SchemaError(f"column {self.name!r}: unknown role {self.role!r}")
        if self.kind not in KINDS:
            raise SchemaError(f"column {self.name!r}: unknown kind {self.kind!r}")
        if not self.missing_policy:
            object.__setattr__(self, "missing_policy", _DEFAULT_POLICY[self.kind])
        if self.missing_policy not in ("mean", "missing_category"):
            raise SchemaError(
                f"column {self.name!r}: unknown missing_policy {self.missing_policy!r}"
            )


@dataclass(frozen=True)
class Schema:
    """Ordered collection of ColumnSpecs with exactly one label column."""

    columns: tuple[ColumnSpec, ...] = field(default_factory=tuple)

    def __post_init__(self):
        names = [c.name for c in self.columns]
        dupes = {n for n in names if names.count(n) > 1}
        if dupes:
            raise SchemaError(f"duplicate column names in schema: {sorted(dupes)}")
        labels = [c for c in self.columns if c.role == "label"]
        if len(labels) != 1:
            raise SchemaError(
                f"schema must declare exactly one label column, found {len(labels)}"
            )
        if labels[0].kind != "categorical":
            raise SchemaError(
                f"label column {labels[0].name!r} must be categorical"
            )

    @property
    def label_column(self) -> ColumnSpec:
        return next(c for c in self.columns if c.role == "label")

    @property
    def feature_columns(self) -> tuple[ColumnSpec, ...]:
        return tuple(c for c in self.columns if c.role == "feature")

    def column(self, name: str) -> ColumnSpec:
        for c in self.columns:
            if c.name == name:
                return c
        raise SchemaError(f"schema has no column named {name!r}")

    def without_label(self) -> "Schema":
        """Schema view for unlabeled inputs: the label column is dropped.

        Bypasses the exactly-one-label invariant on purpose; only used for
        prediction-time ingestion where no label exists.
        """
        trimmed = object.__new__(Schema)
        object.__setattr__(
            trimmed, "columns", tuple(c for c in self.columns if c.role != "label")
        )
        return trimmed

    def to_dict(self) -> dict:
        return {
            "columns": [
                {"name": c.name, "role": c.role, "kind": c.kind}
                for c in self.columns
            ]
        }

    def fingerprint(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return "sha256:" + hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def schema_from_dict(doc: dict) -> Schema:
    """Build and validate a Schema from a parsed JSON document."""
    if not isinstance(doc, dict):
        raise SchemaError("schema document must be a JSON object")
    unknown = set(doc) - {"columns"}
    if unknown:
        raise SchemaError(f"unknown schema keys: {sorted(unknown)}")
    cols = doc.get("columns")
    if not isinstance(cols, list) or not cols:
        raise SchemaError("schema must contain a non-empty 'columns' array")
    specs = []
    for i, col in enumerate(cols):
        if not isinstance(col, dict):
            raise SchemaError(f"columns[{i}] must be an object")
        unknown = set(col) - {"name", "role", "kind"}
        if unknown:
            raise SchemaError(f"columns[{i}]: unknown keys {sorted(unknown)}")
        for key in ("name", "role", "kind"):
            if key not in col:
                raise SchemaError(f"columns[{i}]: missing required key {key!r}")
            if not isinstance(col[key], str):
                raise SchemaError(f"columns[{i}].{key} must be a string")
        specs.append(ColumnSpec(name=col["name"], role=col["role"], kind=col["kind"]))
    return Schema(columns=tuple(specs))


def load_schema(path: str) -> Schema:
    """Load a schema JSON file from disk."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise
    except json.JSONDecodeError as exc:
        raise SchemaError(f"schema file {path}: invalid JSON ({exc})") from exc
    return schema_from_dict(doc)


def draft_schema(csv_path: str, label: str | None = None) -> dict:
    """Draft a schema document by sniffing column kinds from a CSV file.

    A column is drafted numeric when every non-empty cell parses as a finite
    float, categorical otherwise. All columns are drafted as features except
    the one named by ``label``. The draft is a plain dict for the user to
    review and edit; it is never fed into the pipeline automatically, and it
    may not even validate (e.g. when ``label`` is omitted).
    """
    with open(csv_path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{csv_path}: file is empty, cannot draft a schema")
        numeric = {name: True for name in header}
        seen_value = {name: False for name in header}
        for row in reader:
            for name, cell in zip(header, row):
                if cell == "":
                    continue
                seen_value[name] = True
                try:
                    if not math.isfinite(float(cell)):
                        numeric[name] = False
                except ValueError:
                    numeric[name] = False

    columns = []
    for name in header:
        kind = "numeric" if (numeric[name] and seen_value[name]) else "categorical"
        role = "label" if name == label else "feature"
        if role == "label":
            kind = "categorical"
        columns.append({"name": name, "role": role, "kind": kind})
    return {"columns": columns}
