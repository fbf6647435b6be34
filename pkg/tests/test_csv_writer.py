import numpy as np
import pytest

from csv_writer import ResultCSVWriter, format_value


def test_format_value():
    assert format_value(3) == "3"
    assert format_value(np.int64(7)) == "7"
    assert format_value(True) == "1"
    assert format_value(0.1) == "0.10000000000000001"
    assert format_value(np.float64(1e-4)) == "0.0001"
    assert float(format_value(1 / 3)) == 1 / 3
    assert format_value("N") == "N"


def test_writes_header_and_rows_with_lf(tmp_path):
    path = tmp_path / "out.csv"
    writer = ResultCSVWriter(["k", "E"], str(path))
    assert writer.write_rows([[1, -0.5], [2, 0.25]]) == 2
    data = path.read_bytes()
    assert b"\r\n" not in data
    assert data.decode("utf-8") == "k,E\n1,-0.5\n2,0.25\n"


def test_rewrites_existing_file(tmp_path):
    path = tmp_path / "out.csv"
    path.write_text("stale\n")
    ResultCSVWriter(["a"], str(path)).write_rows([[1]])
    assert path.read_text() == "a\n1\n"


@pytest.mark.parametrize("target", [None, "-"])
def test_stdout_target(capsys, target):
    ResultCSVWriter(["t", "P"], target).write_rows([[0.0, 1.0]])
    assert capsys.readouterr().out == "t,P\n0,1\n"


def test_rejects_ragged_rows(tmp_path):
    writer = ResultCSVWriter(["a", "b"], str(tmp_path / "x.csv"))
    with pytest.raises(ValueError):
        writer.write_rows([[1, 2], [3]])


def test_unwritable_path_raises(tmp_path):
    writer = ResultCSVWriter(["a"], str(tmp_path / "missing" / "x.csv"))
    with pytest.raises(OSError):
        writer.write_rows([[1]])
