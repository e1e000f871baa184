"""Numeric discretization and optional one-hot expansion.

Numeric feature columns are cut at fixed fractions (0.25 / 0.50 / 0.75) of
the training-set maximum into four tokens: L25, B25_50, B50_75, G75. The
thresholds are learned once from training data and reused verbatim at
prediction time, so out-of-range prediction values simply land in the
outermost bins.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import SchemaError
from .ingest import RawTable
from .schema import Schema

BIN_TOKENS = ("L25", "B25_50", "B50_75", "G75")


@dataclass(frozen=True)
class BinEdges:
    """Learned cut points for one numeric column, in original units."""

    column: str
    max_value: float
    thresholds: tuple[float, float, float]

    def token(self, value: float) -> str:
        t1, t2, t3 = self.thresholds
        if value < t1:
            return "L25"
        if value < t2:
            return "B25_50"
        if value < t3:
            return "B50_75"
        return "G75"

    def to_dict(self) -> dict:
        return {
            "column": self.column,
            "max_value": self.max_value,
            "thresholds": list(self.thresholds),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "BinEdges":
        return cls(
            column=doc["column"],
            max_value=float(doc["max_value"]),
            thresholds=tuple(float(t) for t in doc["thresholds"]),
        )


@dataclass
class CategoricalTable:
    """All-categorical feature table with the label vector split out.

    attributes preserves schema order; ignore columns are gone. labels is
    None for unlabeled (prediction-time) tables.
    """

    attributes: list[str]
    columns: dict[str, list[str]]
    n_rows: int
    label_name: str | None = None
    labels: list[str] | None = None

    def row(self, i: int) -> dict[str, str]:
        return {a: self.columns[a][i] for a in self.attributes}

    def rows(self):
        for i in range(self.n_rows):
            yield self.row(i)

    def subset(self, indices: list[int]) -> "CategoricalTable":
        return CategoricalTable(
            attributes=list(self.attributes),
            columns={a: [self.columns[a][i] for i in indices] for a in self.attributes},
            n_rows=len(indices),
            label_name=self.label_name,
            labels=[self.labels[i] for i in indices] if self.labels is not None else None,
        )


def fit_bins(table: RawTable) -> dict[str, BinEdges]:
    """Learn cut points for every numeric feature column of an imputed table."""
    edges: dict[str, BinEdges] = {}
    for spec in table.schema.feature_columns:
        if spec.kind != "numeric":
            continue
        cells = table.columns[spec.name]
        mx = max(cells) if cells else 0.0
        edges[spec.name] = BinEdges(
            column=spec.name,
            max_value=float(mx),
            thresholds=(0.25 * mx, 0.50 * mx, 0.75 * mx),
        )
    return edges


def apply_bins(table: RawTable, edges: dict[str, BinEdges]) -> CategoricalTable:
    """Tokenize an imputed table: numeric features binned, categoricals kept.

    The output attribute order follows the schema; the label column is split
    into its own vector (or left as None when absent from the schema view).
    """
    schema: Schema = table.schema
    known = {c.name for c in schema.columns}
    for col in edges:
        if col not in known:
            raise SchemaError(f"bin edges reference unknown column {col!r}")

    attributes: list[str] = []
    columns: dict[str, list[str]] = {}
    for spec in schema.feature_columns:
        cells = table.columns[spec.name]
        if spec.kind == "numeric":
            if spec.name not in edges:
                raise SchemaError(f"no bin edges fitted for numeric column {spec.name!r}")
            e = edges[spec.name]
            tokens = [e.token(v) for v in cells]
        else:
            tokens = [str(v) for v in cells]
        attributes.append(spec.name)
        columns[spec.name] = tokens

    label_name = None
    labels = None
    label_specs = [c for c in schema.columns if c.role == "label"]
    if label_specs:
        label_name = label_specs[0].name
        labels = [str(v) for v in table.columns[label_name]]

    return CategoricalTable(
        attributes=attributes,
        columns=columns,
        n_rows=table.row_count,
        label_name=label_name,
        labels=labels,
    )


def onehot_vocabulary(
    table: CategoricalTable, expand_binary: bool = False
) -> dict[str, list[str]]:
    """Decide which attributes to expand and fix their category order.

    Only attributes with two or more categories are expanded; columns whose
    tokens are already the binary {0, 1} pair stay as-is unless
    expand_binary is set. Categories are sorted so the expanded column
    order is deterministic.
    """
    vocab: dict[str, list[str]] = {}
    for attr in table.attributes:
        cats = sorted(set(table.columns[attr]))
        if len(cats) < 2:
            continue
        if not expand_binary and set(cats) == {"0", "1"}:
            continue
        vocab[attr] = cats
    return vocab


def one_hot_expand(
    table: CategoricalTable,
    vocabulary: dict[str, list[str]] | None = None,
    expand_binary: bool = False,
) -> CategoricalTable:
    """Replace multi-category attributes with per-category 0/1 columns.

    With vocabulary=None the vocabulary is built from the table itself
    (training); passing a stored vocabulary reproduces the training-time
    expansion on new data, where an unseen token yields all-zero indicator
    columns for that attribute. The label vector is never expanded.
    """
    if vocabulary is None:
        vocabulary = onehot_vocabulary(table, expand_binary=expand_binary)

    unknown = set(vocabulary) - set(table.attributes)
    if unknown:
        raise SchemaError(f"one-hot vocabulary references unknown attributes {sorted(unknown)}")

    attributes: list[str] = []
    columns: dict[str, list[str]] = {}
    for attr in table.attributes:
        if attr not in vocabulary:
            attributes.append(attr)
            columns[attr] = list(table.columns[attr])
            continue
        tokens = table.columns[attr]
        for cat in vocabulary[attr]:
            name = f"{attr}_{cat}"
            attributes.append(name)
            columns[name] = ["1" if tok == cat else "0" for tok in tokens]

    return CategoricalTable(
        attributes=attributes,
        columns=columns,
        n_rows=table.n_rows,
        label_name=table.label_name,
        labels=list(table.labels) if table.labels is not None else None,
    )
