"""Per-class category-count pools and their Shannon-entropy bookkeeping.

A fitted pool stores, for each attribute, the table of category counts over
the rows of one class. Classification asks: how does the pool's total
entropy move when one candidate row is (virtually) inserted?

    reference entropy  = sum over attributes of the pool's entropies
    final entropy      = the same sum after inserting the candidate
    dem                = reference - final

A positive dem means the candidate lowered the pool's total entropy, i.e. it
looks like the pool's own kind. The insertion is virtual: pools are never
mutated, so classification is stateless and thread-safe.

The insertion path is incremental. Writing one attribute's entropy as

    H = log2(n) - S/n,   S = sum over categories of c * log2(c)

lets a single insertion update H by adjusting only the one category term of
S that the candidate touches, O(1) per attribute instead of O(categories).
A full-recompute oracle (verify_incremental) checks this path.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from math import log2
from typing import Iterable, Mapping

from .binning import CategoricalTable
from .errors import DataError, SchemaError, UnfittableError

POSITIVE = "positive"
NEGATIVE = "negative"
CLASS_TAGS = (POSITIVE, NEGATIVE)


def attribute_entropy(counts: Mapping[str, int], n: int) -> float:
    """Shannon entropy in bits of one attribute's category-count table.

    Uses the direct definition -sum((c/n) * log2(c/n)) with the 0*log2(0)
    convention; the result is normalized so -0.0 is never returned.
    """
    if n < 1:
        raise DataError("entropy is undefined for an empty count table (n = 0)")
    total = 0
    h = 0.0
    for c in counts.values():
        total += c
        if c:
            p = c / n
            h -= p * log2(p)
    if total != n:
        raise DataError(f"category counts sum to {total}, expected n = {n}")
    return h + 0.0


@dataclass(frozen=True, eq=False)
class EntropyProfile:
    """Per-attribute entropies plus their sum, in pool attribute order.

    metric_sum is the plain sequential sum of the per-attribute entries, so
    two profiles built over the same attribute order are byte-comparable.
    """

    per_attribute: tuple[tuple[str, float], ...]
    metric_sum: float

    @classmethod
    def from_entries(cls, entries: Iterable[tuple[str, float]]) -> "EntropyProfile":
        pairs = tuple(entries)
        total = 0.0
        for _, h in pairs:
            total += h
        return cls(per_attribute=pairs, metric_sum=total)

    def as_dict(self) -> dict[str, float]:
        return dict(self.per_attribute)


@dataclass(frozen=True, eq=False)
class PoolStats:
    """Category counts of one class pool; immutable after construction.

    All entropy operations over a pool are read-only, so a single PoolStats
    may be shared freely across threads. Callers must not mutate the count
    dicts after construction.
    """

    class_tag: str
    attributes: tuple[str, ...]
    counts: dict[str, dict[str, int]]
    n_rows: int

    @classmethod
    def from_counts(
        cls,
        class_tag: str,
        attributes: Iterable[str],
        counts: Mapping[str, Mapping[str, int]],
        n_rows: int,
    ) -> "PoolStats":
        if class_tag not in CLASS_TAGS:
            raise DataError(f"unknown class tag {class_tag!r}")
        attrs = tuple(attributes)
        if n_rows < 1:
            raise UnfittableError(f"class {class_tag!r}: a fitted pool needs at least one row")
        for a in attrs:
            if a not in counts:
                raise SchemaError(f"counts are missing attribute {a!r}")
            if sum(counts[a].values()) != n_rows:
                raise DataError(
                    f"attribute {a!r}: counts sum to {sum(counts[a].values())}, "
                    f"expected {n_rows}"
                )
        return cls(
            class_tag=class_tag,
            attributes=attrs,
            counts={a: counts[a] if isinstance(counts[a], dict) else dict(counts[a]) for a in attrs},
            n_rows=n_rows,
        )

    @cached_property
    def _count_log_sums(self) -> dict[str, float]:
        # S per attribute; the quantity the incremental insertion updates.
        return {
            a: sum(c * log2(c) for c in self.counts[a].values() if c > 1)
            for a in self.attributes
        }

    @cached_property
    def profile(self) -> EntropyProfile:
        return EntropyProfile.from_entries(
            (a, attribute_entropy(self.counts[a], self.n_rows)) for a in self.attributes
        )


def build_pool(rows: CategoricalTable, class_tag: str) -> PoolStats:
    """Count categories per attribute over every row of one class."""
    if rows.n_rows < 1:
        raise UnfittableError(f"class {class_tag!r}: cannot build a pool from zero rows")
    counts: dict[str, dict[str, int]] = {}
    for attr in rows.attributes:
        table: dict[str, int] = {}
        for tok in rows.columns[attr]:
            table[tok] = table.get(tok, 0) + 1
        counts[attr] = table
    return PoolStats.from_counts(
        class_tag=class_tag,
        attributes=rows.attributes,
        counts=counts,
        n_rows=rows.n_rows,
    )


def entropy_profile(pool: PoolStats) -> EntropyProfile:
    """Per-attribute entropies and their sum (the reference entropy metric)."""
    return pool.profile


def _missing_attributes(pool: PoolStats, candidate: Mapping[str, str]) -> list[str]:
    return [a for a in pool.attributes if a not in candidate]


def _entropy_after_insert(s: float, n: int, c_tok: int) -> float:
    # One insertion moves a single category count c -> c+1 and n -> n+1.
    s_new = s + (c_tok + 1) * log2(c_tok + 1)
    if c_tok > 1:
        s_new -= c_tok * log2(c_tok)
    n_new = n + 1
    return log2(n_new) - s_new / n_new + 0.0


def global_profile(pool: PoolStats, candidate: Mapping[str, str]) -> EntropyProfile:
    """Entropy profile of the pool as if the candidate row were appended.

    The pool is not touched; every attribute's entropy is recomputed in O(1)
    from the cached category log-sums, looking up only the candidate's token
    in that attribute's count table. An unseen token behaves as a brand-new
    category of count 1. metric_sum is the final entropy metric.
    """
    missing = _missing_attributes(pool, candidate)
    if missing:
        raise SchemaError(f"candidate row is missing attribute(s) {missing}")
    log_sums = pool._count_log_sums
    n = pool.n_rows
    entries = []
    for attr in pool.attributes:
        c_tok = pool.counts[attr].get(candidate[attr], 0)
        entries.append((attr, _entropy_after_insert(log_sums[attr], n, c_tok)))
    return EntropyProfile.from_entries(entries)


def dem(pool: PoolStats, candidate: Mapping[str, str]) -> tuple[float, float, float]:
    """(reference, final, difference) entropy metrics for one candidate.

    The difference is exactly reference - final: positive when inserting the
    candidate lowers the pool's total entropy.
    """
    reference = pool.profile.metric_sum
    final = global_profile(pool, candidate).metric_sum
    return reference, final, reference - final


def verify_incremental(
    pool: PoolStats, candidate: Mapping[str, str], tol: float = 1e-9
) -> bool:
    """Cross-check the incremental insertion against a full recomputation.

    The oracle rebuilds each attribute's post-insertion count table and
    evaluates the entropy definition directly, sharing no code path with the
    cached-sum update. True iff every attribute agrees within tol.
    """
    incremental = global_profile(pool, candidate).as_dict()
    for attr in pool.attributes:
        table = dict(pool.counts[attr])
        tok = candidate[attr]
        table[tok] = table.get(tok, 0) + 1
        full = attribute_entropy(table, pool.n_rows + 1)
        if abs(full - incremental[attr]) > tol:
            return False
    return True


@dataclass(frozen=True)
class DemScores:
    """The three entropy metrics of one candidate against one pool."""

    reference_entropy: float
    final_entropy: float
    dem: float


@dataclass(frozen=True)
class DemEvaluation:
    """Both pools' scores plus the resulting decision, for auditability."""

    positive: DemScores
    negative: DemScores
    predicted_class: str
    decision_margin: float

    def scores(self, class_tag: str) -> DemScores:
        if class_tag == POSITIVE:
            return self.positive
        if class_tag == NEGATIVE:
            return self.negative
        raise DataError(f"unknown class tag {class_tag!r}")
