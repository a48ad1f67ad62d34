import os

import numpy as np
import pytest

from mgrit_lfa_plots.csv_io import SchemaError, read_table, require_columns


def write(path, text):
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(text)


def test_read_table_round_trip(tmp_path):
    path = os.path.join(tmp_path, "t.csv")
    write(path, "# generated: sometime\n# m: 4\na,b\n1.5,2\n-0.25,7\n")
    table = read_table(path)
    assert table.comments == ["# generated: sometime", "# m: 4"]
    assert table.header == ["a", "b"]
    assert len(table) == 2
    assert np.array_equal(table.column("a"), np.array([1.5, -0.25]))
    assert np.array_equal(table.column("b"), np.array([2.0, 7.0]))


def test_string_column_survives(tmp_path):
    path = os.path.join(tmp_path, "t.csv")
    write(path, "kind,x\nideal,1.0\nrediscretize,2.0\n")
    table = read_table(path)
    assert table.column("kind").tolist() == ["ideal", "rediscretize"]
    assert table.column("x").dtype.kind == "f"


def test_row_width_mismatch(tmp_path):
    path = os.path.join(tmp_path, "t.csv")
    write(path, "a,b\n1,2\n3\n")
    with pytest.raises(SchemaError, match="row 3 has 1 fields"):
        read_table(path)


def test_header_required(tmp_path):
    path = os.path.join(tmp_path, "t.csv")
    write(path, "# only comments\n")
    with pytest.raises(SchemaError, match="no header row"):
        read_table(path)


def test_missing_file():
    with pytest.raises(SchemaError, match="cannot read"):
        read_table("/nonexistent/nope.csv")


def test_missing_column_is_named(tmp_path):
    path = os.path.join(tmp_path, "t.csv")
    write(path, "a,b\n1,2\n")
    table = read_table(path)
    with pytest.raises(SchemaError, match="zzz"):
        table.column("zzz")
    with pytest.raises(SchemaError, match="zzz"):
        require_columns(table, ["a", "zzz"])
    require_columns(table, ["a", "b"])
