"""End-to-end classifier: fit two class pools, decide by entropy change.

Training partitions the labeled rows into the positive (accepted) and
negative (rejected) pools and builds category counts for each; no balancing
or resampling is done, because the per-class division itself is what
neutralizes class imbalance. Prediction virtually inserts the candidate into
both pools and picks the class whose dem is larger; an exact tie goes to the
negative class unless configured otherwise.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Mapping

from .binning import (
    BinEdges,
    CategoricalTable,
    apply_bins,
    fit_bins,
    one_hot_expand,
    onehot_vocabulary,
)
from .entropy import (
    CLASS_TAGS,
    NEGATIVE,
    POSITIVE,
    DemEvaluation,
    DemScores,
    PoolStats,
    build_pool,
    dem,
    entropy_profile,
)
from .errors import ModelFormatError, SchemaError, UnfittableError
from .ingest import RawTable, impute
from .schema import Schema, schema_from_dict

MODEL_FORMAT = 1

ENCODINGS = ("categorical", "onehot")

# CLI-facing names for the tie decision; the conservative default rejects.
TIE_BREAK = {"rejected": NEGATIVE, "accepted": POSITIVE}


@dataclass(frozen=True, eq=False)
class ClassifierModel:
    """Everything prediction needs, frozen at fit time.

    Bin edges, the one-hot vocabulary, and the label mapping are all learned
    from training data and stored so that prediction-time preprocessing can
    never drift from what the pools were built on.
    """

    schema: Schema
    bin_edges: dict[str, BinEdges]
    encoding: str
    expand_binary: bool
    onehot_vocab: dict[str, list[str]] | None
    label_mapping: dict[str, str]
    pool_positive: PoolStats
    pool_negative: PoolStats
    alpha_positive: float
    alpha_negative: float

    @property
    def attributes(self) -> tuple[str, ...]:
        return self.pool_positive.attributes

    def pool(self, class_tag: str) -> PoolStats:
        if class_tag == POSITIVE:
            return self.pool_positive
        if class_tag == NEGATIVE:
            return self.pool_negative
        raise SchemaError(f"unknown class tag {class_tag!r}")

    def token_for(self, class_tag: str) -> str:
        for token, tag in self.label_mapping.items():
            if tag == class_tag:
                return token
        raise SchemaError(f"label mapping has no token for class {class_tag!r}")


def resolve_label_mapping(
    tokens, positive_label: str | None = None
) -> dict[str, str]:
    """Map the two observed label tokens to the positive/negative tags.

    With positive_label given, that token is positive and the other
    negative. Without it, the 0/1 loan-status convention applies (0 = paid
    back = positive, 1 = defaulted = negative); any other token pair must be
    mapped explicitly rather than guessed.
    """
    distinct = sorted(set(tokens))
    if len(distinct) > 2:
        raise SchemaError(
            f"label must have exactly 2 distinct tokens, found {distinct}"
        )
    if len(distinct) < 2:
        # one observed token = the other class has zero rows; that is a
        # training-data deficiency, not a schema defect
        raise UnfittableError(
            f"training labels contain only {distinct}; both classes need at least one row"
        )
    if positive_label is not None:
        if positive_label not in distinct:
            raise SchemaError(
                f"positive label {positive_label!r} does not occur; observed {distinct}"
            )
        other = next(t for t in distinct if t != positive_label)
        return {positive_label: POSITIVE, other: NEGATIVE}
    if distinct == ["0", "1"]:
        return {"0": POSITIVE, "1": NEGATIVE}
    raise SchemaError(
        f"cannot infer which of {distinct} is the positive label; "
        "set positive_label (CLI: --positive-label)"
    )


def fit(
    train: CategoricalTable,
    label_mapping: Mapping[str, str],
    *,
    schema: Schema,
    bin_edges: Mapping[str, BinEdges],
    encoding: str = "categorical",
    expand_binary: bool = False,
    onehot_vocab: dict[str, list[str]] | None = None,
) -> ClassifierModel:
    """Partition rows by label and build both pools.

    The table must already be fully categorical (binned/expanded); the
    preprocessing artifacts are passed in and stored verbatim so the model
    file is self-contained.
    """
    if train.labels is None or train.label_name is None:
        raise SchemaError("training table has no label column")
    if encoding not in ENCODINGS:
        raise SchemaError(f"unknown encoding {encoding!r}")

    mapping = dict(label_mapping)
    if sorted(mapping.values()) != sorted(CLASS_TAGS):
        raise SchemaError(
            f"label mapping must assign one token to each of {CLASS_TAGS}, got {mapping}"
        )
    unmapped = sorted(set(train.labels) - set(mapping))
    if unmapped:
        raise SchemaError(f"label token(s) {unmapped} not covered by the label mapping")

    by_tag: dict[str, list[int]] = {POSITIVE: [], NEGATIVE: []}
    for i, token in enumerate(train.labels):
        by_tag[mapping[token]].append(i)
    for tag in CLASS_TAGS:
        if not by_tag[tag]:
            raise UnfittableError(
                f"class {tag!r} (label token {_token_of(mapping, tag)!r}) has zero training rows"
            )

    pool_pos = build_pool(train.subset(by_tag[POSITIVE]), POSITIVE)
    pool_neg = build_pool(train.subset(by_tag[NEGATIVE]), NEGATIVE)
    return ClassifierModel(
        schema=schema,
        bin_edges=dict(bin_edges),
        encoding=encoding,
        expand_binary=expand_binary,
        onehot_vocab=onehot_vocab,
        label_mapping=mapping,
        pool_positive=pool_pos,
        pool_negative=pool_neg,
        alpha_positive=entropy_profile(pool_pos).metric_sum,
        alpha_negative=entropy_profile(pool_neg).metric_sum,
    )


def _token_of(mapping: Mapping[str, str], tag: str) -> str:
    return next(tok for tok, t in mapping.items() if t == tag)


def fit_pipeline(
    raw: RawTable,
    *,
    positive_label: str | None = None,
    label_mapping: Mapping[str, str] | None = None,
    encoding: str = "categorical",
    expand_binary: bool = False,
) -> ClassifierModel:
    """Full training path: impute, learn bins, tokenize, expand, fit."""
    table = impute(raw)
    edges = fit_bins(table)
    cat = apply_bins(table, edges)
    vocab = None
    if encoding == "onehot":
        vocab = onehot_vocabulary(cat, expand_binary=expand_binary)
        cat = one_hot_expand(cat, vocabulary=vocab, expand_binary=expand_binary)
    if label_mapping is None:
        if cat.labels is None:
            raise SchemaError("training table has no label column")
        label_mapping = resolve_label_mapping(cat.labels, positive_label)
    return fit(
        cat,
        label_mapping,
        schema=raw.schema,
        bin_edges=edges,
        encoding=encoding,
        expand_binary=expand_binary,
        onehot_vocab=vocab,
    )


def encode_table(model: ClassifierModel, raw: RawTable) -> CategoricalTable:
    """Preprocess new rows with the model's stored artifacts, never refit."""
    table = impute(raw)
    cat = apply_bins(table, model.bin_edges)
    if model.encoding == "onehot":
        cat = one_hot_expand(
            cat, vocabulary=model.onehot_vocab, expand_binary=model.expand_binary
        )
    return cat


def predict_one(
    model: ClassifierModel,
    candidate: Mapping[str, str],
    tie_break: str = NEGATIVE,
) -> DemEvaluation:
    """Score one candidate against both pools and take the argmax dem."""
    if tie_break not in CLASS_TAGS:
        raise SchemaError(f"unknown tie_break class {tie_break!r}")
    a_pos, b_pos, d_pos = dem(model.pool_positive, candidate)
    a_neg, b_neg, d_neg = dem(model.pool_negative, candidate)
    if d_pos > d_neg:
        predicted = POSITIVE
    elif d_neg > d_pos:
        predicted = NEGATIVE
    else:
        predicted = tie_break
    margin = (d_pos - d_neg) if predicted == POSITIVE else (d_neg - d_pos)
    return DemEvaluation(
        positive=DemScores(reference_entropy=a_pos, final_entropy=b_pos, dem=d_pos),
        negative=DemScores(reference_entropy=a_neg, final_entropy=b_neg, dem=d_neg),
        predicted_class=predicted,
        decision_margin=margin,
    )


def predict_batch(
    model: ClassifierModel,
    candidates: CategoricalTable,
    threads: int = 0,
    tie_break: str = NEGATIVE,
) -> list[tuple[str, DemEvaluation]]:
    """Score every row; output order always matches input order.

    Each row is evaluated against the original pools (the model never
    updates between candidates), so rows are independent and the work can
    fan out over threads without changing any result. threads: 0 = auto,
    1 = in-process serial, n = pool of n.
    """

    def score(item: tuple[int, Mapping[str, str]]) -> tuple[str, DemEvaluation]:
        i, row = item
        try:
            ev = predict_one(model, row, tie_break=tie_break)
        except SchemaError as exc:
            raise SchemaError(f"row {i}: {exc}") from exc
        return model.token_for(ev.predicted_class), ev

    items = enumerate(candidates.rows())
    if threads == 1:
        return [score(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads or None) as pool:
        return list(pool.map(score, items))


def _model_document(model: ClassifierModel) -> dict:
    profiles = {
        tag: dict(entropy_profile(model.pool(tag)).per_attribute)
        for tag in CLASS_TAGS
    }
    return {
        "format": MODEL_FORMAT,
        "schema": model.schema.to_dict(),
        "schema_fingerprint": model.schema.fingerprint(),
        "encoding": model.encoding,
        "expand_binary": model.expand_binary,
        "onehot_vocabulary": model.onehot_vocab,
        "label_mapping": model.label_mapping,
        "bin_edges": [model.bin_edges[c].to_dict() for c in sorted(model.bin_edges)],
        "attributes": list(model.attributes),
        "pools": {
            tag: {
                "tag": tag,
                "n_rows": model.pool(tag).n_rows,
                "counts": model.pool(tag).counts,
            }
            for tag in CLASS_TAGS
        },
        "entropy_profiles": profiles,
        "alpha": {POSITIVE: model.alpha_positive, NEGATIVE: model.alpha_negative},
    }


def save_model(model: ClassifierModel, path: str) -> None:
    """Write the model as a single JSON document.

    Counts are integers and entropies plain floats, so json round-trips
    every value exactly (float repr is shortest-exact in this language).
    """
    import json

    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_model_document(model), fh, separators=(",", ":"))
        fh.write("\n")


def load_model(path: str) -> ClassifierModel:
    """Read a model file back; any structural defect raises ModelFormatError.

    Per-attribute entropies and both alphas are recomputed from the counts
    and compared to the stored values within 1e-12; a mismatch means the
    file was corrupted or hand-edited.
    """
    import json

    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise ModelFormatError(f"{path}: model document must be a JSON object")
    version = doc.get("format")
    if version != MODEL_FORMAT:
        raise ModelFormatError(
            f"{path}: model format {version!r} is not supported "
            f"(this build reads format {MODEL_FORMAT})"
        )
    try:
        schema = schema_from_dict(doc["schema"])
        if schema.fingerprint() != doc["schema_fingerprint"]:
            raise ModelFormatError(
                f"{path}: schema fingerprint does not match the embedded schema"
            )
        attributes = tuple(doc["attributes"])
        pools = {}
        for tag in CLASS_TAGS:
            entry = doc["pools"][tag]
            counts = {
                attr: {str(c): int(n) for c, n in table.items()}
                for attr, table in entry["counts"].items()
            }
            pools[tag] = PoolStats.from_counts(
                class_tag=entry["tag"],
                attributes=attributes,
                counts=counts,
                n_rows=int(entry["n_rows"]),
            )
        edges = {e["column"]: BinEdges.from_dict(e) for e in doc["bin_edges"]}
        encoding = doc["encoding"]
        if encoding not in ENCODINGS:
            raise ModelFormatError(f"{path}: unknown encoding {encoding!r}")
        vocab = doc["onehot_vocabulary"]
        if vocab is not None:
            vocab = {a: [str(c) for c in cats] for a, cats in vocab.items()}
        label_mapping = {str(t): str(tag) for t, tag in doc["label_mapping"].items()}
        if sorted(label_mapping.values()) != sorted(CLASS_TAGS):
            raise ModelFormatError(f"{path}: invalid label mapping {label_mapping}")
        stored_profiles = doc["entropy_profiles"]
        stored_alpha = doc["alpha"]
        model = ClassifierModel(
            schema=schema,
            bin_edges=edges,
            encoding=encoding,
            expand_binary=bool(doc["expand_binary"]),
            onehot_vocab=vocab,
            label_mapping=label_mapping,
            pool_positive=pools[POSITIVE],
            pool_negative=pools[NEGATIVE],
            alpha_positive=float(stored_alpha[POSITIVE]),
            alpha_negative=float(stored_alpha[NEGATIVE]),
        )
    except ModelFormatError:
        raise
    except Exception as exc:
        raise ModelFormatError(f"{path}: malformed model file ({exc})") from exc

    for tag in CLASS_TAGS:
        fresh = entropy_profile(model.pool(tag))
        cached = stored_profiles.get(tag, {})
        for attr, h in fresh.per_attribute:
            if attr not in cached or abs(cached[attr] - h) > 1e-12:
                raise ModelFormatError(
                    f"{path}: stored entropy for {tag}/{attr} disagrees with counts"
                )
        alpha = model.alpha_positive if tag == POSITIVE else model.alpha_negative
        if abs(fresh.metric_sum - alpha) > 1e-12:
            raise ModelFormatError(
                f"{path}: stored alpha for pool {tag!r} disagrees with counts"
            )
    return model
