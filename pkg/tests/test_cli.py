"""Command-line behavior: exit codes, outputs, config precedence."""

import csv
import json
import subprocess
import sys

import pytest

SCHEMA = {
    "columns": [
        {"name": "id", "role": "ignore", "kind": "numeric"},
        {"name": "income", "role": "feature", "kind": "numeric"},
        {"name": "grade", "role": "feature", "kind": "categorical"},
        {"name": "loan_status", "role": "label", "kind": "categorical"},
    ]
}

TRAIN = """id,income,grade,loan_status
1,100,A,0
2,200,A,0
3,50,A,0
4,300,B,1
5,400,B,1
6,350,B,1
"""


def run(*argv):
    return subprocess.run(
        [sys.executable, "-m", "demet", *argv], capture_output=True, text=True
    )


@pytest.fixture()
def workdir(tmp_path):
    (tmp_path / "train.csv").write_text(TRAIN)
    (tmp_path / "schema.json").write_text(json.dumps(SCHEMA))
    return tmp_path


def fit_model(workdir):
    model = workdir / "model.json"
    proc = run(
        "fit",
        str(workdir / "train.csv"),
        "--schema",
        str(workdir / "schema.json"),
        "--out",
        str(model),
    )
    assert proc.returncode == 0, proc.stderr
    return model, proc


# --- fit -----------------------------------------------------------------------

def test_fit_happy_path(workdir):
    model, proc = fit_model(workdir)
    assert model.is_file()
    assert "pool positive: 3 rows" in proc.stdout
    assert "pool negative: 3 rows" in proc.stdout
    assert "alpha" in proc.stdout


def test_fit_missing_label_column_exit_2(workdir):
    (workdir / "bad.csv").write_text("id,income,grade\n1,10,A\n")
    proc = run(
        "fit", str(workdir / "bad.csv"),
        "--schema", str(workdir / "schema.json"),
        "--out", str(workdir / "m.json"),
    )
    assert proc.returncode == 2
    assert "loan_status" in proc.stderr


def test_fit_single_class_exit_3(workdir):
    (workdir / "one.csv").write_text(
        "id,income,grade,loan_status\n1,10,A,0\n2,20,A,0\n"
    )
    proc = run(
        "fit", str(workdir / "one.csv"),
        "--schema", str(workdir / "schema.json"),
        "--out", str(workdir / "m.json"),
    )
    assert proc.returncode == 3


def test_fit_without_schema_is_usage_error(workdir):
    proc = run("fit", str(workdir / "train.csv"), "--out", str(workdir / "m.json"))
    assert proc.returncode == 64


def test_fit_missing_train_file_exit_2(workdir):
    proc = run(
        "fit", str(workdir / "nope.csv"),
        "--schema", str(workdir / "schema.json"),
        "--out", str(workdir / "m.json"),
    )
    assert proc.returncode == 2


def test_fit_bad_output_dir_exit_2(workdir):
    proc = run(
        "fit", str(workdir / "train.csv"),
        "--schema", str(workdir / "schema.json"),
        "--out", str(workdir / "ghost" / "m.json"),
    )
    assert proc.returncode == 2


def test_fit_non_01_labels_need_positive_label(workdir):
    (workdir / "t.csv").write_text(
        "id,income,grade,loan_status\n1,10,A,paid\n2,300,B,late\n"
    )
    proc = run(
        "fit", str(workdir / "t.csv"),
        "--schema", str(workdir / "schema.json"),
        "--out", str(workdir / "m.json"),
    )
    assert proc.returncode == 2
    proc = run(
        "fit", str(workdir / "t.csv"),
        "--schema", str(workdir / "schema.json"),
        "--out", str(workdir / "m.json"),
        "--positive-label", "paid",
    )
    assert proc.returncode == 0, proc.stderr


# --- predict --------------------------------------------------------------------

def test_predict_labeled_and_unlabeled(workdir):
    model, _ = fit_model(workdir)
    (workdir / "new.csv").write_text("id,income,grade\n7,120,A\n8,380,B\n9,90,Z\n")
    out = workdir / "preds.csv"
    proc = run("predict", str(model), str(workdir / "new.csv"), "--out", str(out))
    assert proc.returncode == 0, proc.stderr
    with open(out, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["index", "predicted", "dem_positive", "dem_negative", "decision_margin"]
    assert len(rows) == 4
    assert rows[1][1] == "0"
    assert rows[2][1] == "1"
    # unseen grade token Z classifies without error
    assert rows[3][0] == "2"
    # labeled input also accepted (label just ignored)
    proc = run("predict", str(model), str(workdir / "train.csv"), "--out", str(out))
    assert proc.returncode == 0
    with open(out, newline="") as fh:
        assert len(list(csv.reader(fh))) == 7


def test_predict_missing_model_exit_4(workdir):
    proc = run(
        "predict", str(workdir / "ghost.json"), str(workdir / "train.csv"),
        "--out", str(workdir / "p.csv"),
    )
    assert proc.returncode == 4


def test_predict_corrupt_model_exit_4(workdir):
    bad = workdir / "bad.json"
    bad.write_text("{definitely not json")
    proc = run(
        "predict", str(bad), str(workdir / "train.csv"),
        "--out", str(workdir / "p.csv"),
    )
    assert proc.returncode == 4


def test_predict_schema_incompatible_input_exit_2(workdir):
    model, _ = fit_model(workdir)
    (workdir / "new.csv").write_text("id,grade\n7,A\n")
    proc = run(
        "predict", str(model), str(workdir / "new.csv"),
        "--out", str(workdir / "p.csv"),
    )
    assert proc.returncode == 2
    assert "income" in proc.stderr


# --- evaluate -------------------------------------------------------------------

def test_evaluate_prints_and_writes_report(workdir):
    model, _ = fit_model(workdir)
    report = workdir / "report.json"
    proc = run("evaluate", str(model), str(workdir / "train.csv"), "--report", str(report))
    assert proc.returncode == 0, proc.stderr
    assert "accuracy  1" in proc.stdout
    assert "confusion" in proc.stdout
    doc = json.loads(report.read_text())
    assert doc["accuracy"] == 1.0
    assert doc["confusion"]["positive"]["positive"] == 3


def test_evaluate_empty_test_exit_2(workdir):
    model, _ = fit_model(workdir)
    (workdir / "empty.csv").write_text("id,income,grade,loan_status\n")
    proc = run("evaluate", str(model), str(workdir / "empty.csv"))
    assert proc.returncode == 2


def test_evaluate_unknown_label_token_exit_2(workdir):
    model, _ = fit_model(workdir)
    (workdir / "odd.csv").write_text("id,income,grade,loan_status\n1,10,A,maybe\n")
    proc = run("evaluate", str(model), str(workdir / "odd.csv"))
    assert proc.returncode == 2
    assert "maybe" in proc.stderr


# --- inspect --------------------------------------------------------------------

def test_inspect_entropy_table(workdir):
    model, _ = fit_model(workdir)
    out = workdir / "et.tsv"
    proc = run("inspect", str(model), "--entropy-table", str(out))
    assert proc.returncode == 0, proc.stderr
    lines = out.read_text().strip().split("\n")
    assert lines[0] == "pool\tattribute\tentropy"
    assert sum("__total__" in ln for ln in lines) == 2


def test_inspect_plot_data_renders_figure(workdir):
    model, _ = fit_model(workdir)
    out = workdir / "epa.tsv"
    proc = run("inspect", str(model), "--plot-data", "entropy_per_attribute", str(out))
    assert proc.returncode == 0, proc.stderr
    assert out.is_file()
    assert (workdir / "epa.png").is_file()
    assert (workdir / "epa.png").stat().st_size > 1000


def test_inspect_no_figure_flag(workdir):
    model, _ = fit_model(workdir)
    out = workdir / "epa.tsv"
    proc = run(
        "inspect", str(model), "--plot-data", "entropy_per_attribute", str(out), "--no-figure"
    )
    assert proc.returncode == 0
    assert out.is_file()
    assert not (workdir / "epa.png").exists()


def test_inspect_accuracy_bars_with_baselines(workdir):
    model, _ = fit_model(workdir)
    report = workdir / "report.json"
    run("evaluate", str(model), str(workdir / "train.csv"), "--report", str(report))
    baselines = workdir / "base.tsv"
    baselines.write_text("rf\t0.87\nsvm\t0.82\n")
    out = workdir / "acc.tsv"
    fig = workdir / "bars.png"
    proc = run(
        "inspect", str(model),
        "--plot-data", "accuracy_bars", str(out),
        "--report", str(report),
        "--baselines", str(baselines),
        "--figure", str(fig),
    )
    assert proc.returncode == 0, proc.stderr
    lines = out.read_text().strip().split("\n")
    assert len(lines) == 4
    assert lines[1].startswith("entropy_based\t")
    assert fig.is_file()


def test_inspect_accuracy_bars_requires_report(workdir):
    model, _ = fit_model(workdir)
    proc = run("inspect", str(model), "--plot-data", "accuracy_bars", str(workdir / "a.tsv"))
    assert proc.returncode == 64


def test_inspect_unknown_kind_exit_64(workdir):
    model, _ = fit_model(workdir)
    proc = run("inspect", str(model), "--plot-data", "pie", str(workdir / "p.tsv"))
    assert proc.returncode == 64


def test_inspect_flags_mutually_exclusive(workdir):
    model, _ = fit_model(workdir)
    proc = run(
        "inspect", str(model),
        "--entropy-table", str(workdir / "a.tsv"),
        "--plot-data", "entropy_per_attribute", str(workdir / "b.tsv"),
    )
    assert proc.returncode == 64


def test_inspect_baselines_only_with_accuracy_bars(workdir):
    model, _ = fit_model(workdir)
    proc = run(
        "inspect", str(model),
        "--entropy-table", str(workdir / "a.tsv"),
        "--baselines", str(workdir / "b.tsv"),
    )
    assert proc.returncode == 64


# --- usage / config ----------------------------------------------------------------

def test_missing_out_flag_exit_64(workdir):
    proc = run("fit", str(workdir / "train.csv"), "--schema", str(workdir / "schema.json"))
    assert proc.returncode == 64


def test_unknown_subcommand_exit_64():
    assert run("transmogrify").returncode == 64


def test_negative_threads_exit_64(workdir):
    model, _ = fit_model(workdir)
    proc = run(
        "predict", str(model), str(workdir / "train.csv"),
        "--out", str(workdir / "p.csv"), "--threads", "-2",
    )
    assert proc.returncode == 64


def test_version_flag():
    proc = run("--version")
    assert proc.returncode == 0
    assert proc.stdout.startswith("demet ")


def test_config_file_supplies_schema(workdir):
    config = workdir / "config.json"
    config.write_text(json.dumps({"schema": str(workdir / "schema.json")}))
    proc = run(
        "fit", str(workdir / "train.csv"),
        "--config", str(config),
        "--out", str(workdir / "m.json"),
    )
    assert proc.returncode == 0, proc.stderr


def test_flags_beat_config(workdir):
    # config names a bogus schema; the flag must win
    config = workdir / "config.json"
    config.write_text(json.dumps({"schema": str(workdir / "ghost.json")}))
    proc = run(
        "fit", str(workdir / "train.csv"),
        "--config", str(config),
        "--schema", str(workdir / "schema.json"),
        "--out", str(workdir / "m.json"),
    )
    assert proc.returncode == 0, proc.stderr


def test_config_unknown_key_exit_2(workdir):
    config = workdir / "config.json"
    config.write_text(json.dumps({"schema": str(workdir / "schema.json"), "oops": 1}))
    proc = run(
        "fit", str(workdir / "train.csv"),
        "--config", str(config),
        "--out", str(workdir / "m.json"),
    )
    assert proc.returncode == 2
    assert "oops" in proc.stderr


def test_config_label_mapping(workdir):
    (workdir / "t.csv").write_text(
        "id,income,grade,loan_status\n1,10,A,paid\n2,300,B,late\n"
    )
    config = workdir / "config.json"
    config.write_text(
        json.dumps(
            {
                "schema": str(workdir / "schema.json"),
                "label_mapping": {"paid": "positive", "late": "negative"},
            }
        )
    )
    proc = run(
        "fit", str(workdir / "t.csv"), "--config", str(config),
        "--out", str(workdir / "m.json"),
    )
    assert proc.returncode == 0, proc.stderr
    assert "pool positive: 1 rows" in proc.stdout


def test_onehot_encoding_flag(workdir):
    model = workdir / "m.json"
    proc = run(
        "fit", str(workdir / "train.csv"),
        "--schema", str(workdir / "schema.json"),
        "--out", str(model), "--encoding", "onehot",
    )
    assert proc.returncode == 0, proc.stderr
    doc = json.loads(model.read_text())
    assert doc["encoding"] == "onehot"
    assert "grade_A" in doc["attributes"]
    out = workdir / "p.csv"
    proc = run("predict", str(model), str(workdir / "train.csv"), "--out", str(out))
    assert proc.returncode == 0, proc.stderr


def test_tie_break_flag_accepted(workdir):
    # symmetric training data forces exact ties; accepted must flip the call
    (workdir / "sym.csv").write_text(
        "id,income,grade,loan_status\n1,10,A,0\n2,10,B,0\n3,10,A,1\n4,10,B,1\n"
    )
    model = workdir / "m.json"
    run(
        "fit", str(workdir / "sym.csv"),
        "--schema", str(workdir / "schema.json"),
        "--out", str(model),
    )
    (workdir / "probe.csv").write_text("id,income,grade\n9,10,A\n")
    out = workdir / "p.csv"
    run("predict", str(model), str(workdir / "probe.csv"), "--out", str(out))
    rejected = out.read_text().strip().split("\n")[1].split(",")[1]
    run(
        "predict", str(model), str(workdir / "probe.csv"),
        "--out", str(out), "--tie-break", "accepted",
    )
    accepted = out.read_text().strip().split("\n")[1].split(",")[1]
    assert rejected == "1"
    assert accepted == "0"
