"""Accuracy reporting, entropy tables, and plot-data emission.

Everything here is pure text/data generation: TSV strings, JSON-ready
dicts, a human-readable summary. Rendering belongs to the figures module.
Delimited output is TSV (tab delimiter, newline line endings, header row)
with floats at 17 significant digits so every value round-trips exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .binning import CategoricalTable
from .classifier import ClassifierModel, predict_batch
from .entropy import CLASS_TAGS, NEGATIVE, POSITIVE, entropy_profile
from .errors import DataError, SchemaError

# Marker used in the entropy table's per-pool sum row.
TOTAL_ROW = "__total__"

PLOT_KINDS = ("accuracy_bars", "entropy_per_attribute")

# Name under which this classifier's own accuracy appears among baselines.
SELF_NAME = "entropy_based"


def fmt_float(x: float) -> str:
    """17 significant digits: enough for exact float round-trip."""
    return format(x, ".17g")


@dataclass
class EvaluationReport:
    """Test-set metrics; everything derivable from the confusion matrix.

    degenerate_metrics lists rates whose denominator was zero and were
    therefore reported as 0.0 (e.g. precision of a never-predicted class).
    """

    n_total: int
    n_correct: int
    accuracy: float
    confusion: dict[str, dict[str, int]]
    precision: dict[str, float]
    recall: dict[str, float]
    f1: dict[str, float]
    mean_decision_margin: dict[str, float]
    degenerate_metrics: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "n_total": self.n_total,
            "n_correct": self.n_correct,
            "accuracy": self.accuracy,
            "confusion": self.confusion,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "mean_decision_margin": self.mean_decision_margin,
            "degenerate_metrics": self.degenerate_metrics,
        }

    def to_text(self) -> str:
        """Human-readable summary; accuracy at 4 significant digits."""
        lines = [
            f"rows      {self.n_total}",
            f"correct   {self.n_correct}",
            f"accuracy  {format(self.accuracy, '.4g')}",
            "",
            "confusion (rows = true class, columns = predicted)",
            f"{'':>10}{POSITIVE:>10}{NEGATIVE:>10}",
        ]
        for true in CLASS_TAGS:
            row = self.confusion[true]
            lines.append(f"{true:>10}{row[POSITIVE]:>10}{row[NEGATIVE]:>10}")
        lines.append("")
        for tag in CLASS_TAGS:
            lines.append(
                f"class {tag}: precision {format(self.precision[tag], '.4g')}  "
                f"recall {format(self.recall[tag], '.4g')}  "
                f"f1 {format(self.f1[tag], '.4g')}  "
                f"mean margin {format(self.mean_decision_margin[tag], '.4g')} bits"
            )
        if self.degenerate_metrics:
            lines.append("zero-denominator metrics reported as 0.0: "
                         + ", ".join(self.degenerate_metrics))
        return "\n".join(lines) + "\n"


def report_from_dict(doc: dict) -> EvaluationReport:
    """Rebuild a report from its JSON form (the inverse of to_dict)."""
    try:
        return EvaluationReport(
            n_total=int(doc["n_total"]),
            n_correct=int(doc["n_correct"]),
            accuracy=float(doc["accuracy"]),
            confusion={
                t: {p: int(doc["confusion"][t][p]) for p in CLASS_TAGS}
                for t in CLASS_TAGS
            },
            precision={t: float(doc["precision"][t]) for t in CLASS_TAGS},
            recall={t: float(doc["recall"][t]) for t in CLASS_TAGS},
            f1={t: float(doc["f1"][t]) for t in CLASS_TAGS},
            mean_decision_margin={
                t: float(doc["mean_decision_margin"][t]) for t in CLASS_TAGS
            },
            degenerate_metrics=[str(x) for x in doc.get("degenerate_metrics", [])],
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"malformed evaluation report ({exc!r})") from exc


def metrics_from_confusion(
    confusion: dict[str, dict[str, int]]
) -> tuple[float, dict[str, float], dict[str, float], dict[str, float], list[str]]:
    """(accuracy, precision, recall, f1, degenerate) from a 2x2 matrix alone."""
    n_total = sum(confusion[t][p] for t in CLASS_TAGS for p in CLASS_TAGS)
    if n_total == 0:
        raise DataError("confusion matrix is empty")
    n_correct = sum(confusion[t][t] for t in CLASS_TAGS)
    degenerate: list[str] = []
    precision: dict[str, float] = {}
    recall: dict[str, float] = {}
    f1: dict[str, float] = {}
    for tag in CLASS_TAGS:
        predicted = sum(confusion[t][tag] for t in CLASS_TAGS)
        actual = sum(confusion[tag][p] for p in CLASS_TAGS)
        tp = confusion[tag][tag]
        if predicted == 0:
            precision[tag] = 0.0
            degenerate.append(f"precision[{tag}]")
        else:
            precision[tag] = tp / predicted
        if actual == 0:
            recall[tag] = 0.0
            degenerate.append(f"recall[{tag}]")
        else:
            recall[tag] = tp / actual
        if precision[tag] + recall[tag] == 0.0:
            f1[tag] = 0.0
            degenerate.append(f"f1[{tag}]")
        else:
            f1[tag] = 2 * precision[tag] * recall[tag] / (precision[tag] + recall[tag])
    return n_correct / n_total, precision, recall, f1, degenerate


def evaluate(
    model: ClassifierModel,
    test: CategoricalTable,
    threads: int = 0,
    tie_break: str = NEGATIVE,
) -> EvaluationReport:
    """Predict every labeled test row and tabulate the outcome."""
    if test.labels is None:
        raise SchemaError("test table has no label column")
    if test.n_rows == 0:
        raise DataError("test set is empty")
    unknown = sorted(set(test.labels) - set(model.label_mapping))
    if unknown:
        raise SchemaError(f"unknown label token(s) {unknown} in test data")

    results = predict_batch(model, test, threads=threads, tie_break=tie_break)
    confusion = {t: {p: 0 for p in CLASS_TAGS} for t in CLASS_TAGS}
    margin_sum = {t: 0.0 for t in CLASS_TAGS}
    n_correct = 0
    for token, (_, ev) in zip(test.labels, results):
        true = model.label_mapping[token]
        confusion[true][ev.predicted_class] += 1
        margin_sum[true] += ev.decision_margin
        if ev.predicted_class == true:
            n_correct += 1

    accuracy, precision, recall, f1, degenerate = metrics_from_confusion(confusion)
    mean_margin: dict[str, float] = {}
    for tag in CLASS_TAGS:
        n_tag = sum(confusion[tag].values())
        if n_tag == 0:
            mean_margin[tag] = 0.0
            degenerate.append(f"mean_decision_margin[{tag}]")
        else:
            mean_margin[tag] = margin_sum[tag] / n_tag
    return EvaluationReport(
        n_total=test.n_rows,
        n_correct=n_correct,
        accuracy=accuracy,
        confusion=confusion,
        precision=precision,
        recall=recall,
        f1=f1,
        mean_decision_margin=mean_margin,
        degenerate_metrics=degenerate,
    )


def entropy_table(model: ClassifierModel) -> str:
    """Per-pool, per-attribute entropies as TSV; one sum row per pool.

    Values come straight from the pools' entropy profiles, so they equal the
    classifier's internal numbers bit for bit.
    """
    lines = ["pool\tattribute\tentropy"]
    for tag in CLASS_TAGS:
        profile = entropy_profile(model.pool(tag))
        for attr, h in profile.per_attribute:
            lines.append(f"{tag}\t{attr}\t{fmt_float(h)}")
        lines.append(f"{tag}\t{TOTAL_ROW}\t{fmt_float(profile.metric_sum)}")
    return "\n".join(lines) + "\n"


def parse_baselines(path: str) -> list[tuple[str, float]]:
    """Read externally produced (classifier name, accuracy) pairs.

    TSV, one pair per line; a header line is recognized by its second field
    not parsing as a number and skipped.
    """
    rows: list[tuple[str, float]] = []
    with open(path, encoding="utf-8") as fh:
        for i, line in enumerate(fh):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise DataError(
                    f"{path}: line {i + 1}: expected 2 tab-separated fields, got {len(parts)}"
                )
            name, value = parts
            try:
                acc = float(value)
            except ValueError:
                if i == 0:
                    continue
                raise DataError(f"{path}: line {i + 1}: {value!r} is not a number")
            rows.append((name, acc))
    return rows


def accuracy_bars_data(
    report: EvaluationReport,
    baselines: list[tuple[str, float]] | None = None,
) -> str:
    """Bar-chart TSV: this classifier's accuracy merged with any baselines."""
    lines = ["classifier\taccuracy", f"{SELF_NAME}\t{fmt_float(report.accuracy)}"]
    for name, acc in baselines or []:
        lines.append(f"{name}\t{fmt_float(acc)}")
    return "\n".join(lines) + "\n"


def entropy_per_attribute_data(model: ClassifierModel) -> str:
    """Line-plot TSV: per-pool attribute entropies with 0-based x index."""
    lines = ["pool\tindex\tattribute\tentropy"]
    for tag in CLASS_TAGS:
        profile = entropy_profile(model.pool(tag))
        for i, (attr, h) in enumerate(profile.per_attribute):
            lines.append(f"{tag}\t{i}\t{attr}\t{fmt_float(h)}")
    return "\n".join(lines) + "\n"


def export_plot_data(
    kind: str,
    *,
    model: ClassifierModel | None = None,
    report: EvaluationReport | None = None,
    baselines: list[tuple[str, float]] | None = None,
) -> str:
    """Dispatch on plot-data kind; inputs required per kind."""
    if kind == "accuracy_bars":
        if report is None:
            raise DataError("accuracy_bars needs an evaluation report")
        return accuracy_bars_data(report, baselines)
    if kind == "entropy_per_attribute":
        if model is None:
            raise DataError("entropy_per_attribute needs a model")
        return entropy_per_attribute_data(model)
    raise DataError(f"unknown plot-data kind {kind!r}; known: {', '.join(PLOT_KINDS)}")
