"""CSV loading and imputation."""

import pytest

from demet import (
    MISSING_TOKEN,
    ParseError,
    SchemaError,
    impute,
    load_csv,
    schema_from_dict,
)

SCHEMA = schema_from_dict(
    {
        "columns": [
            {"name": "a", "role": "feature", "kind": "numeric"},
            {"name": "b", "role": "feature", "kind": "categorical"},
            {"name": "loan_status", "role": "label", "kind": "categorical"},
        ]
    }
)


def write(tmp_path, text, name="data.csv"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_load_basic(tmp_path):
    path = write(tmp_path, "a,b,loan_status\n1,x,0\n2,y,1\n3,x,0\n")
    table = load_csv(path, SCHEMA)
    assert table.row_count == 3
    assert table.columns["a"] == [1.0, 2.0, 3.0]
    assert table.columns["b"] == ["x", "y", "x"]
    assert table.columns["loan_status"] == ["0", "1", "0"]


def test_empty_cell_is_missing(tmp_path):
    path = write(tmp_path, "a,b,loan_status\n,x,0\n2,,1\n")
    table = load_csv(path, SCHEMA)
    assert table.columns["a"] == [None, 2.0]
    assert table.columns["b"] == ["x", None]


def test_unparseable_numeric_is_missing(tmp_path):
    path = write(tmp_path, "a,b,loan_status\noops,x,0\nnan,y,1\ninf,x,0\n")
    table = load_csv(path, SCHEMA)
    assert table.columns["a"] == [None, None, None]


def test_quoted_fields(tmp_path):
    path = write(tmp_path, 'a,b,loan_status\n1,"x, with comma",0\n')
    table = load_csv(path, SCHEMA)
    assert table.columns["b"] == ["x, with comma"]


def test_missing_file_is_io_error(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_csv(str(tmp_path / "nope.csv"), SCHEMA)


def test_header_missing_schema_column_named(tmp_path):
    path = write(tmp_path, "a,b\n1,x\n")
    with pytest.raises(SchemaError, match="loan_status"):
        load_csv(path, SCHEMA)


def test_empty_file_is_parse_error(tmp_path):
    path = write(tmp_path, "")
    with pytest.raises(ParseError):
        load_csv(path, SCHEMA)


def test_duplicate_header_is_parse_error(tmp_path):
    path = write(tmp_path, "a,a,b,loan_status\n1,2,x,0\n")
    with pytest.raises(ParseError, match="duplicate"):
        load_csv(path, SCHEMA)


def test_ragged_row_reports_line_number(tmp_path):
    path = write(tmp_path, "a,b,loan_status\n1,x,0\n2,y\n")
    with pytest.raises(ParseError, match="line 3"):
        load_csv(path, SCHEMA)


def test_extra_columns_dropped_with_warning(tmp_path):
    path = write(tmp_path, "a,b,extra,loan_status\n1,x,zzz,0\n")
    table = load_csv(path, SCHEMA)
    assert "extra" not in table.columns
    assert table.metadata["dropped_columns"] == ["extra"]


def test_header_order_is_irrelevant(tmp_path):
    path = write(tmp_path, "loan_status,b,a\n0,x,1\n")
    table = load_csv(path, SCHEMA)
    assert table.columns["a"] == [1.0]
    assert table.columns["b"] == ["x"]


# --- impute ------------------------------------------------------------------

def test_impute_numeric_mean(tmp_path):
    path = write(tmp_path, "a,b,loan_status\n2,x,0\n,x,0\n4,x,1\n")
    table = impute(load_csv(path, SCHEMA))
    assert table.columns["a"] == [2.0, 3.0, 4.0]


def test_impute_categorical_token(tmp_path):
    path = write(tmp_path, "a,b,loan_status\n1,A,0\n2,,1\n3,A,0\n")
    table = impute(load_csv(path, SCHEMA))
    assert table.columns["b"] == ["A", MISSING_TOKEN, "A"]


def test_impute_all_missing_numeric_zero_fill_and_flag(tmp_path):
    path = write(tmp_path, "a,b,loan_status\n,x,0\n,y,1\n")
    table = impute(load_csv(path, SCHEMA))
    assert table.columns["a"] == [0.0, 0.0]
    assert table.metadata["all_missing_numeric"] == ["a"]


def test_impute_is_idempotent(tmp_path):
    path = write(tmp_path, "a,b,loan_status\n2,x,0\n,,1\n4,x,0\n")
    once = impute(load_csv(path, SCHEMA))
    twice = impute(once)
    assert twice.columns == once.columns
    assert twice.metadata == once.metadata


def test_impute_never_changes_observed_cells(tmp_path):
    path = write(tmp_path, "a,b,loan_status\n2,x,0\n,y,1\n10,z,0\n")
    raw = load_csv(path, SCHEMA)
    table = impute(raw)
    assert table.columns["a"][0] == 2.0
    assert table.columns["a"][2] == 10.0
    assert table.columns["b"] == ["x", "y", "z"]
    # and the input table itself was not touched
    assert raw.columns["a"][1] is None


def test_impute_preserves_shape(tmp_path):
    path = write(tmp_path, "a,b,loan_status\n2,x,0\n,y,1\n")
    raw = load_csv(path, SCHEMA)
    table = impute(raw)
    assert table.row_count == raw.row_count
    assert set(table.columns) == set(raw.columns)
    assert all(None not in v for v in table.columns.values())
