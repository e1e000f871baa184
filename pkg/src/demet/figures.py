"""Render plot-data TSVs to image files.

Kept separate from evaluation so the metrics layer stays free of any
rendering dependency; the CLI calls this right after writing the TSV, so a
figure always shows exactly the numbers that were emitted. matplotlib is
imported lazily with the Agg backend: no display is ever needed.
"""

from __future__ import annotations

from .errors import DataError
from .evaluation import PLOT_KINDS


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def _parse_tsv(text: str) -> list[list[str]]:
    lines = [ln for ln in text.split("\n") if ln]
    if len(lines) < 2:
        raise DataError("plot data has no rows")
    return [ln.split("\t") for ln in lines[1:]]


def render_accuracy_bars(tsv_text: str, out_path: str) -> None:
    """Horizontal bar per classifier, accuracy on [0, 1]."""
    rows = _parse_tsv(tsv_text)
    names = [r[0] for r in rows]
    values = [float(r[1]) for r in rows]
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(7, 0.6 * len(rows) + 1.5))
    ax.barh(range(len(rows)), values, color="tab:blue")
    ax.set_yticks(range(len(rows)))
    ax.set_yticklabels(names)
    ax.invert_yaxis()
    ax.set_xlim(0.0, 1.0)
    ax.set_xlabel("accuracy")
    ax.set_title("Classifier accuracy")
    for i, v in enumerate(values):
        ax.text(v, i, f" {v:.4f}", va="center")
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)


def render_entropy_per_attribute(tsv_text: str, out_path: str) -> None:
    """One line per pool: attribute index on x, entropy in bits on y."""
    rows = _parse_tsv(tsv_text)
    series: dict[str, tuple[list[int], list[float]]] = {}
    for pool, idx, _attr, h in rows:
        xs, ys = series.setdefault(pool, ([], []))
        xs.append(int(idx))
        ys.append(float(h))
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(8, 4.5))
    for pool, (xs, ys) in series.items():
        ax.plot(xs, ys, marker="o", markersize=3, label=pool)
    ax.set_xlabel("attribute index")
    ax.set_ylabel("entropy (bits)")
    ax.set_title("Per-attribute pool entropies")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)


def render_plot_data(kind: str, tsv_text: str, out_path: str) -> None:
    """Render one emitted plot-data TSV to an image file."""
    if kind == "accuracy_bars":
        render_accuracy_bars(tsv_text, out_path)
    elif kind == "entropy_per_attribute":
        render_entropy_per_attribute(tsv_text, out_path)
    else:
        raise DataError(f"unknown plot-data kind {kind!r}; known: {', '.join(PLOT_KINDS)}")
