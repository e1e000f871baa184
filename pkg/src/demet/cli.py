"""Command-line interface: fit, predict, evaluate, inspect.

Exit codes are part of the contract and stable across releases:

    0   success
    2   input/schema problem (bad CSV, bad schema, bad config, empty data)
    3   training data cannot produce a model (a class pool is empty)
    4   model file problem (missing, corrupt, wrong format version)
    64  usage error (bad flags, unknown plot kind)

Every path named on the command line is checked before any computation
starts, so a typo in an output path cannot waste a long fit run.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import dataclass

from . import __version__
from .classifier import (
    TIE_BREAK,
    ClassifierModel,
    encode_table,
    fit_pipeline,
    load_model,
    predict_batch,
    save_model,
)
from .ingest import load_csv
from .entropy import CLASS_TAGS
from .errors import (
    DataError,
    DemetError,
    ModelFormatError,
    ParseError,
    SchemaError,
    UnfittableError,
)
from .evaluation import (
    PLOT_KINDS,
    entropy_table,
    evaluate,
    export_plot_data,
    fmt_float,
    parse_baselines,
    report_from_dict,
)
from .figures import render_plot_data
from .schema import load_schema

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_UNFITTABLE = 3
EXIT_MODEL = 4
EXIT_USAGE = 64


class UsageError(DemetError):
    """Command line is structurally wrong; maps to exit 64."""


@dataclass(frozen=True)
class RunConfig:
    """Effective settings after merging flags > config file > defaults."""

    schema_path: str | None = None
    encoding: str = "categorical"
    tie_break: str = "rejected"
    positive_label: str | None = None
    label_mapping: dict[str, str] | None = None
    expand_binary: bool = False
    threads: int = 0
    model_path: str | None = None
    input_paths: tuple[str, ...] = ()
    output_paths: tuple[str, ...] = ()


_CONFIG_KEYS = (
    "schema",
    "encoding",
    "tie_break",
    "positive_label",
    "label_mapping",
    "expand_binary",
    "threads",
)


def _load_config_file(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise DataError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise SchemaError(f"config file {path}: invalid JSON ({exc})")
    if not isinstance(doc, dict):
        raise SchemaError(f"config file {path}: must be a JSON object")
    unknown = set(doc) - set(_CONFIG_KEYS)
    if unknown:
        raise SchemaError(f"config file {path}: unknown keys {sorted(unknown)}")
    return doc


def _pick(flag_value, config: dict, key: str, default):
    if flag_value is not None:
        return flag_value
    if key in config and config[key] is not None:
        return config[key]
    return default


def _resolve_config(
    args: argparse.Namespace,
    model_path: str | None = None,
    input_paths: tuple[str, ...] = (),
    output_paths: tuple[str, ...] = (),
) -> RunConfig:
    config = _load_config_file(args.config) if args.config else {}

    encoding = _pick(args.encoding, config, "encoding", "categorical")
    if encoding not in ("categorical", "onehot"):
        raise SchemaError(f"unknown encoding {encoding!r}")
    tie_break = _pick(args.tie_break, config, "tie_break", "rejected")
    if tie_break not in TIE_BREAK:
        raise SchemaError(f"unknown tie_break {tie_break!r}")
    threads = _pick(args.threads, config, "threads", 0)
    if not isinstance(threads, int) or threads < 0:
        raise SchemaError(f"threads must be a nonnegative integer, got {threads!r}")
    mapping = config.get("label_mapping")
    if mapping is not None:
        if not isinstance(mapping, dict) or sorted(mapping.values()) != sorted(CLASS_TAGS):
            raise SchemaError(
                f"config label_mapping must map one token to each of {CLASS_TAGS}"
            )
        mapping = {str(k): str(v) for k, v in mapping.items()}
    expand_binary = _pick(args.expand_binary, config, "expand_binary", False)
    if not isinstance(expand_binary, bool):
        raise SchemaError(f"expand_binary must be a boolean, got {expand_binary!r}")

    return RunConfig(
        schema_path=_pick(args.schema, config, "schema", None),
        encoding=encoding,
        tie_break=tie_break,
        positive_label=_pick(args.positive_label, config, "positive_label", None),
        label_mapping=mapping,
        expand_binary=expand_binary,
        threads=threads,
        model_path=model_path,
        input_paths=tuple(input_paths),
        output_paths=tuple(output_paths),
    )


def _validate_paths(cfg: RunConfig) -> None:
    """Check every referenced path up front, before any computation."""
    if cfg.model_path is not None and not os.path.isfile(cfg.model_path):
        raise ModelFormatError(f"model file not found: {cfg.model_path}")
    for path in cfg.input_paths:
        if not os.path.isfile(path):
            raise DataError(f"input file not found: {path}")
    for path in cfg.output_paths:
        parent = os.path.dirname(path) or "."
        if not os.path.isdir(parent):
            raise DataError(f"output directory does not exist: {parent}")


def _read_model(path: str) -> ClassifierModel:
    try:
        return load_model(path)
    except OSError as exc:
        raise ModelFormatError(f"cannot read model file {path}: {exc}")


def _peek_header(path: str) -> list[str]:
    with open(path, newline="", encoding="utf-8") as fh:
        try:
            return next(csv.reader(fh))
        except StopIteration:
            raise ParseError(f"{path}: file is empty (no header row)")


def cmd_fit(args: argparse.Namespace) -> int:
    cfg = _resolve_config(
        args,
        input_paths=(args.train,) + ((args.config,) if args.config else ()),
        output_paths=(args.out,),
    )
    if cfg.schema_path is None:
        raise UsageError("fit requires --schema (flag or config file)")
    if not os.path.isfile(cfg.schema_path):
        raise DataError(f"schema file not found: {cfg.schema_path}")
    _validate_paths(cfg)

    schema = load_schema(cfg.schema_path)
    raw = load_csv(args.train, schema)
    model = fit_pipeline(
        raw,
        positive_label=cfg.positive_label,
        label_mapping=cfg.label_mapping,
        encoding=cfg.encoding,
        expand_binary=cfg.expand_binary,
    )
    save_model(model, args.out)
    for tag in CLASS_TAGS:
        pool = model.pool(tag)
        alpha = model.alpha_positive if tag == "positive" else model.alpha_negative
        print(f"pool {tag}: {pool.n_rows} rows, alpha {fmt_float(alpha)}")
    print(f"model written: {args.out}")
    return EXIT_OK


def cmd_predict(args: argparse.Namespace) -> int:
    cfg = _resolve_config(
        args,
        model_path=args.model,
        input_paths=(args.input,) + ((args.config,) if args.config else ()),
        output_paths=(args.out,),
    )
    _validate_paths(cfg)

    model = _read_model(args.model)
    schema = model.schema
    label = schema.label_column.name
    if label not in _peek_header(args.input):
        schema = schema.without_label()
    raw = load_csv(args.input, schema)
    table = encode_table(model, raw)
    results = predict_batch(
        model, table, threads=cfg.threads, tie_break=TIE_BREAK[cfg.tie_break]
    )
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            ["index", "predicted", "dem_positive", "dem_negative", "decision_margin"]
        )
        for i, (token, ev) in enumerate(results):
            writer.writerow(
                [
                    i,
                    token,
                    fmt_float(ev.positive.dem),
                    fmt_float(ev.negative.dem),
                    fmt_float(ev.decision_margin),
                ]
            )
    print(f"predictions written: {args.out} ({len(results)} rows)")
    return EXIT_OK


def cmd_evaluate(args: argparse.Namespace) -> int:
    cfg = _resolve_config(
        args,
        model_path=args.model,
        input_paths=(args.test,) + ((args.config,) if args.config else ()),
        output_paths=(args.report,) if args.report else (),
    )
    _validate_paths(cfg)

    model = _read_model(args.model)
    raw = load_csv(args.test, model.schema)
    table = encode_table(model, raw)
    report = evaluate(
        model, table, threads=cfg.threads, tie_break=TIE_BREAK[cfg.tie_break]
    )
    sys.stdout.write(report.to_text())
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(report.to_dict(), fh, indent=2)
            fh.write("\n")
        print(f"report written: {args.report}")
    return EXIT_OK


def cmd_inspect(args: argparse.Namespace) -> int:
    if args.plot_data:
        kind, out_path = args.plot_data
        if kind not in PLOT_KINDS:
            raise UsageError(
                f"unknown plot-data kind {kind!r}; known: {', '.join(PLOT_KINDS)}"
            )
    else:
        kind, out_path = None, args.entropy_table
        for flag, name in ((args.baselines, "--baselines"), (args.report, "--report")):
            if flag:
                raise UsageError(f"{name} is only meaningful with --plot-data")
        if args.figure:
            raise UsageError("--figure is only meaningful with --plot-data")
    if args.figure and args.no_figure:
        raise UsageError("--figure and --no-figure are mutually exclusive")
    if kind == "entropy_per_attribute":
        for flag, name in ((args.baselines, "--baselines"), (args.report, "--report")):
            if flag:
                raise UsageError(f"{name} is only meaningful with accuracy_bars")
    if kind == "accuracy_bars" and not args.report:
        raise UsageError("accuracy_bars needs --report <report.json> from `evaluate`")

    inputs = tuple(p for p in (args.baselines, args.report, args.config) if p)
    cfg = _resolve_config(
        args, model_path=args.model, input_paths=inputs, output_paths=(out_path,)
    )
    _validate_paths(cfg)

    model = _read_model(args.model)
    if kind is None:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(entropy_table(model))
        print(f"entropy table written: {out_path}")
        return EXIT_OK

    report = None
    if args.report:
        with open(args.report, encoding="utf-8") as fh:
            try:
                report = report_from_dict(json.load(fh))
            except json.JSONDecodeError as exc:
                raise DataError(f"report file {args.report}: invalid JSON ({exc})")
    baselines = parse_baselines(args.baselines) if args.baselines else None
    text = export_plot_data(kind, model=model, report=report, baselines=baselines)
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write(text)
    print(f"plot data written: {out_path}")
    if not args.no_figure:
        fig_path = args.figure or os.path.splitext(out_path)[0] + ".png"
        render_plot_data(kind, text, fig_path)
        print(f"figure written: {fig_path}")
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on bad usage; the contract says 64."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _nonneg_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer")
    if value < 0:
        raise argparse.ArgumentTypeError("thread count cannot be negative")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--schema", metavar="PATH", help="schema JSON file")
    common.add_argument("--config", metavar="PATH", help="config JSON file")
    common.add_argument(
        "--threads",
        metavar="N",
        type=_nonneg_int,
        help="worker threads for batch prediction (0 = auto)",
    )
    common.add_argument(
        "--encoding",
        choices=["categorical", "onehot"],
        help="feature encoding after binning (default categorical)",
    )
    common.add_argument(
        "--tie-break",
        choices=sorted(TIE_BREAK),
        help="class to pick when both dems tie (default rejected)",
    )
    common.add_argument(
        "--positive-label",
        metavar="TOKEN",
        help="label token of the positive (accepted) class",
    )
    common.add_argument(
        "--expand-binary",
        action="store_true",
        default=None,
        help="with --encoding onehot, also expand binary 0/1 attributes",
    )

    parser = _Parser(
        prog="demet",
        description="Entropy-perturbation binary classifier (difference of entropy metrics).",
    )
    parser.add_argument("--version", action="version", version=f"demet {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_fit = sub.add_parser("fit", parents=[common], help="train a model from a labeled CSV")
    p_fit.add_argument("train", help="training CSV")
    p_fit.add_argument("--out", required=True, metavar="PATH", help="model file to write")
    p_fit.set_defaults(handler=cmd_fit)

    p_pred = sub.add_parser("predict", parents=[common], help="classify rows of a CSV")
    p_pred.add_argument("model", help="model file from `fit`")
    p_pred.add_argument("input", help="CSV of candidate rows (label column optional)")
    p_pred.add_argument("--out", required=True, metavar="PATH", help="predictions CSV to write")
    p_pred.set_defaults(handler=cmd_predict)

    p_eval = sub.add_parser("evaluate", parents=[common], help="score a labeled test CSV")
    p_eval.add_argument("model", help="model file from `fit`")
    p_eval.add_argument("test", help="labeled test CSV")
    p_eval.add_argument("--report", metavar="PATH", help="JSON report to write")
    p_eval.set_defaults(handler=cmd_evaluate)

    p_insp = sub.add_parser(
        "inspect", parents=[common], help="emit entropy tables and plot data from a model"
    )
    p_insp.add_argument("model", help="model file from `fit`")
    what = p_insp.add_mutually_exclusive_group(required=True)
    what.add_argument(
        "--entropy-table", metavar="OUT.tsv", help="write per-pool attribute entropies"
    )
    what.add_argument(
        "--plot-data",
        nargs=2,
        metavar=("KIND", "OUT.tsv"),
        help=f"write plot data; KIND is one of: {', '.join(PLOT_KINDS)}",
    )
    p_insp.add_argument(
        "--report", metavar="PATH", help="evaluation report JSON (accuracy_bars source)"
    )
    p_insp.add_argument(
        "--baselines", metavar="PATH", help="TSV of (classifier, accuracy) rows to merge"
    )
    p_insp.add_argument("--figure", metavar="OUT.png", help="figure path (default: beside the TSV)")
    p_insp.add_argument(
        "--no-figure", action="store_true", help="skip rendering a figure beside the TSV"
    )
    p_insp.set_defaults(handler=cmd_inspect)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except UnfittableError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNFITTABLE
    except ModelFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MODEL
    except (SchemaError, ParseError, DataError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
