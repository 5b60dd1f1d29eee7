"""Sweep engine: grids, guarded evaluation, parallel determinism, emission."""

import json
import math
import os

import numpy as np
import pytest

from unruh_steer.errors import DomainError
from unruh_steer.model import UnruhParams, kossakowski_free
from unruh_steer.steering import sic_closed_form_free
from unruh_steer.sweeps import (BOUNDARY_COLUMNS, DIAGNOSTICS_COLUMN,
                                GridSpec, SweepResult, eval_boundary,
                                eval_sic_free, eval_surface, load_csv,
                                load_json, plot_script, resolve_jobs,
                                result_to_csv, result_to_json, run_grid,
                                write_result)


def test_gridspec_parse_round_trip():
    g = GridSpec.parse("a:log:0.5:100:200")
    assert (g.name, g.scale, g.lo, g.hi, g.count) == ("a", "log", 0.5, 100.0, 200)
    assert GridSpec.parse(g.spec_string()) == g


@pytest.mark.parametrize("bad", [
    "a:linear:1:0:5",       # min >= max
    "a:log:0:1:5",          # log needs positive min
    "a:linear:0:1:1",       # fewer than two points
    "q:linear:0:1:5",       # unknown parameter
    "a:cosine:0:1:5",       # unknown scale
    "a:linear:0:1",         # wrong arity
    "a:linear:x:1:5",       # non-numeric
])
def test_gridspec_rejects(bad):
    with pytest.raises(DomainError):
        GridSpec.parse(bad)


def test_gridspec_values():
    lin = GridSpec.parse("tau:linear:-3:1:5").values()
    assert np.allclose(lin, [-3.0, -2.0, -1.0, 0.0, 1.0], atol=1e-15)
    log = GridSpec.parse("a:log:1:16:5").values()
    assert log[0] == 1.0 and log[-1] == 16.0
    assert np.allclose(np.diff(np.log(log)), math.log(2.0), atol=1e-12)


# module level so the process-pool path can pickle them
def _square(x, y):
    return (x * y, x - y), ""


def _flaky(x, y):
    if x == 2.0 and y == 10.0:
        raise DomainError("bad, point")
    return (x + y,), ""


def test_run_grid_serial_rows():
    res = run_grid([("x", [1.0, 2.0]), ("y", [10.0, 20.0, 30.0])],
                   _square, ("prod", "diff"))
    assert res.columns == ("x", "y", "prod", "diff")
    assert len(res.rows) == 6
    # lexicographic order, first axis outermost
    assert res.rows[0] == (1.0, 10.0, 10.0, -9.0)
    assert res.rows[3] == (2.0, 10.0, 20.0, -8.0)
    assert not res.has_diagnostics


def test_run_grid_parallel_is_identical():
    axes = [("x", np.linspace(0.0, 5.0, 9)), ("y", np.linspace(1.0, 2.0, 7))]
    serial = run_grid(axes, _square, ("prod", "diff"), jobs=1)
    parallel = run_grid(axes, _square, ("prod", "diff"), jobs=3)
    assert serial.rows == parallel.rows
    assert result_to_csv(serial) == result_to_csv(parallel)


def test_run_grid_guards_package_errors():
    res = run_grid([("x", [1.0, 2.0]), ("y", [10.0, 20.0])], _flaky, ("s",))
    assert res.has_diagnostics
    bad = res.rows[2]
    assert bad[:2] == (2.0, 10.0) and math.isnan(bad[2])
    assert res.diagnostics[2] == "DomainError: bad, point"
    assert res.diagnostics[0] == ""
    assert res.rows[3] == (2.0, 20.0, 22.0)


def test_eval_sic_free_row():
    (ratio, sic), diag = eval_sic_free(1.0, 0.5, 2.0 * math.pi)
    k = kossakowski_free(UnruhParams(1.0, 2.0 * math.pi))
    assert ratio == k.ratio
    assert sic == sic_closed_form_free(0.5, k.ratio)
    assert diag == ""


def test_eval_surface_flags_singularity():
    values, diag = eval_surface(1.0, 1.0)
    assert diag == "singular"
    assert math.isnan(values[0]) and math.isnan(values[1])
    assert values[2] is False and values[3] is False


def test_csv_format(tmp_path):
    res = run_grid([("x", [1.0 / 3.0, 2.0])], lambda x: ((x,), ""), ("y",))
    text = result_to_csv(res)
    lines = text.split("\n")
    assert lines[0] == "x,y"
    assert "0.33333333333333331" in lines[1]  # 17 significant digits
    assert text.endswith("\n") and "\r" not in text
    assert DIAGNOSTICS_COLUMN not in text


def test_csv_diagnostics_column_and_booleans():
    res = run_grid([("x", [1.0, 2.0]), ("y", [10.0, 20.0])], _flaky, ("s",))
    text = result_to_csv(res)
    assert text.split("\n")[0] == f"x,y,s,{DIAGNOSTICS_COLUMN}"
    assert "DomainError: bad; point" in text  # commas sanitized
    bres = run_grid([("a", [2.0, 4.0])],
                    lambda a: ((a > 3.0,), ""), ("big",))
    btext = result_to_csv(bres)
    assert "false" in btext and "true" in btext


def test_csv_round_trip(tmp_path):
    res = run_grid([("x", [1.0, 2.0]), ("y", [10.0, 20.0])], _flaky, ("s",))
    path = str(tmp_path / "out.csv")
    write_result(res, path, "csv")
    back = load_csv(path)
    assert back.columns == res.columns
    # commas inside diagnostics are sanitized on the way out
    assert back.diagnostics == [d.replace(",", ";") for d in res.diagnostics]
    for got, want in zip(back.rows, res.rows):
        for g, w in zip(got, want):
            assert g == w or (math.isnan(g) and math.isnan(w))


def test_json_round_trip_and_meta(tmp_path, monkeypatch):
    monkeypatch.delenv("SOURCE_DATE_EPOCH", raising=False)
    res = run_grid([("x", [1.0, 2.0])], lambda x: ((2.0 * x, x > 1.5), ""),
                   ("d", "flag"), meta={"axes": ["x"]})
    path = str(tmp_path / "out.json")
    write_result(res, path, "json")
    payload = json.loads(open(path).read())
    assert payload["meta"]["timestamp"] == "1970-01-01T00:00:00Z"
    assert payload["meta"]["version"]
    assert payload["rows"][1] == {"x": 2.0, "d": 4.0, "flag": True}
    back = load_json(path)
    assert back.columns == res.columns
    assert back.rows == [tuple(r) for r in res.rows]


def test_json_timestamp_honors_source_date_epoch(monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "1700000000")
    res = SweepResult(columns=("x",), rows=[(1.0,)], diagnostics=[""])
    assert '"timestamp": "2023-11-14T22:13:20Z"' in result_to_json(res)


def test_write_result_reports_path_on_failure(tmp_path):
    res = SweepResult(columns=("x",), rows=[(1.0,)], diagnostics=[""])
    missing = str(tmp_path / "nope" / "out.csv")
    with pytest.raises(OSError, match="nope"):
        write_result(res, missing, "csv")
    with pytest.raises(DomainError):
        write_result(res, str(tmp_path / "x.bin"), "parquet")


def test_plot_script_shapes(tmp_path):
    line = SweepResult(columns=("a", "sic"), rows=[(1.0, 2.0)],
                       diagnostics=[""], meta={"axes": ["a"]})
    text = plot_script(line, "data.csv", "csv")
    assert "plot 'data.csv'" in text and "splot" not in text
    surf = SweepResult(columns=("tau", "R", "literal"), rows=[(0.0, 0.0, 0.0)],
                       diagnostics=[""], meta={"axes": ["tau", "R"]})
    assert "splot 'data.csv'" in plot_script(surf, "data.csv", "csv")


def test_write_result_with_plot(tmp_path):
    res = SweepResult(columns=("a", "sic"), rows=[(1.0, 2.0), (2.0, 1.0)],
                      diagnostics=["", ""], meta={"axes": ["a"]})
    path = str(tmp_path / "sweep.csv")
    written = write_result(res, path, "csv", plot=True)
    assert written == [path, path + ".gp"]
    assert os.path.exists(path + ".gp")


def test_resolve_jobs(monkeypatch):
    monkeypatch.delenv("UNRUH_STEER_JOBS", raising=False)
    assert resolve_jobs() == 1
    monkeypatch.setenv("UNRUH_STEER_JOBS", "4")
    assert resolve_jobs() == 4
    assert resolve_jobs(2) == 2  # explicit beats the environment
    with pytest.raises(DomainError):
        resolve_jobs(0)


def test_boundary_eval_columns():
    values, diag = eval_boundary(1.0, 2.0 * math.pi, 1.0, 1.0)
    assert len(values) == len(BOUNDARY_COLUMNS)
    assert values[-1] is False and diag == ""
