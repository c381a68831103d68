"""CLI and config-file behaviour: exit codes, file formats, determinism."""

import json
from pathlib import Path

import numpy as np
import pytest

from fracosc.cli import main
from fracosc.config import (
    get_float,
    get_floats,
    get_int,
    get_str,
    load_config,
    parse_config_text,
)
from fracosc.errors import ParseError
from fracosc.specfun import mittag_leffler

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


# ------------------------------------------------------------- config file --


def test_config_basic_parse():
    cfg = parse_config_text("# comment\n\na.b = 1.5\nname = hello world\n")
    assert cfg == {"a.b": "1.5", "name": "hello world"}


def test_config_missing_equals_reports_line():
    with pytest.raises(ParseError) as exc:
        parse_config_text("a = 1\nnonsense\n")
    assert "line 2" in str(exc.value)


@pytest.mark.parametrize("text", ["9bad = 1\n", "UPPER = 1\n", "a..b = 1\n"])
def test_config_rejects_malformed_keys(text):
    with pytest.raises(ParseError):
        parse_config_text(text)


def test_config_rejects_duplicate_key():
    with pytest.raises(ParseError) as exc:
        parse_config_text("a = 1\na = 2\n")
    assert "duplicate" in str(exc.value)


def test_config_typed_getters():
    cfg = {"f": "2.5", "i": "7", "s": "abc", "v": "1.0, 2.5,3"}
    assert get_float(cfg, "f") == 2.5
    assert get_int(cfg, "i") == 7
    assert get_str(cfg, "s") == "abc"
    assert get_floats(cfg, "v") == (1.0, 2.5, 3.0)
    assert get_float(cfg, "absent", 9.0) == 9.0


def test_config_required_key_missing():
    with pytest.raises(ParseError):
        get_float({}, "needed")
    with pytest.raises(ParseError):
        get_int({"x": "not-an-int"}, "x")


def test_load_config_hashes_bytes(tmp_path):
    p = tmp_path / "c.cfg"
    p.write_text("a = 1\n")
    cfg, sha = load_config(p)
    assert cfg == {"a": "1"}
    assert len(sha) == 64 and int(sha, 16) >= 0


# -------------------------------------------------------------- exit codes --


def test_help_exits_zero(capsys):
    assert main(["--help"]) == 0
    assert "deriv" in capsys.readouterr().out


def test_missing_argument_is_usage_error(capsys):
    assert main(["deriv", "--alpha", "0.5", "--grid", "0:1:0.1"]) == 1


def test_bad_grid_is_usage_error(capsys):
    assert main(["deriv", "--expr", "t", "--alpha", "0.5", "--grid", "1:0:0.1"]) == 1


def test_inadmissible_exponent_is_domain_error(capsys):
    rc = main(["deriv", "--expr", "t^0.2", "--alpha", "0.5", "--grid", "0:1:0.1"])
    assert rc == 2
    assert "domain error" in capsys.readouterr().err


def test_missing_config_file(capsys):
    assert main(["el", "--config", "/no/such/file.cfg"]) == 1


def test_discretized_grid_must_start_at_base(capsys):
    rc = main(
        ["deriv", "--expr", "t^2", "--alpha", "0.5", "--grid", "0.5:1:0.1",
         "--scheme", "gl"]
    )
    assert rc == 1


def test_l1_right_side_rejected(capsys):
    rc = main(
        ["deriv", "--expr", "t^2", "--alpha", "0.5", "--grid", "0:1:0.1",
         "--scheme", "l1", "--side", "right"]
    )
    assert rc == 1


# ------------------------------------------------------------------- deriv --


def _read_csv(path):
    rows = []
    meta = []
    for line in path.read_text().splitlines():
        if line.startswith("#"):
            meta.append(line)
        elif "," in line and line[0].isalpha():
            header = line.split(",")
        else:
            rows.append([float(v) for v in line.split(",")])
    return meta, header, np.array(rows)


def test_deriv_exact_power_rule(tmp_path):
    out = tmp_path / "d.csv"
    rc = main(["deriv", "--expr", "t^2", "--alpha", "0.5",
               "--grid", "0:1:0.25", "--out", str(out)])
    assert rc == 0
    meta, header, rows = _read_csv(out)
    assert header == ["t", "f", "d"]
    assert meta[0].startswith("# tool=fracosc version=")
    from fracosc.specfun import gamma

    scale = gamma(3.0) / gamma(2.5)
    assert np.allclose(rows[:, 2], scale * rows[:, 0] ** 1.5, atol=1e-14)


def test_deriv_series_gl_tracks_exact(tmp_path):
    a = tmp_path / "gl.csv"
    b = tmp_path / "ex.csv"
    series = "[[1.0, 2.0], [0.5, 3.1]]"
    base = ["deriv", "--series", series, "--alpha", "0.4", "--grid", "0:1:0.001"]
    assert main(base + ["--scheme", "gl", "--out", str(a)]) == 0
    assert main(base + ["--scheme", "exact", "--out", str(b)]) == 0
    _, _, gl = _read_csv(a)
    _, _, exact = _read_csv(b)
    assert np.max(np.abs(gl[:, 2] - exact[:, 2])) < 5e-3


# ---------------------------------------------------------------------- el --


def test_el_reference_config_meets_target(tmp_path, capsys):
    out = tmp_path / "r.json"
    rc = main(["el", "--config", f"{CONFIGS}/el_reference.cfg",
               "--assert", "1e-8", "--out", str(out)])
    assert rc == 0
    payload = json.loads(out.read_text())
    assert payload["max_residual"] <= 1e-8
    assert payload["kind"] == "fractional" and payload["k"] == 3


def test_el_classical_reference_config(tmp_path):
    out = tmp_path / "rc.json"
    rc = main(["el", "--config", f"{CONFIGS}/el_reference_classical.cfg",
               "--assert", "1e-8", "--out", str(out)])
    assert rc == 0
    assert json.loads(out.read_text())["kind"] == "classical"


def test_el_perturbed_config_fails_assertion(tmp_path, capsys):
    out = tmp_path / "p.json"
    rc = main(["el", "--config", f"{CONFIGS}/el_perturbed.cfg",
               "--assert", "1e-6", "--out", str(out)])
    assert rc == 3
    assert "assertion failed" in capsys.readouterr().err
    assert json.loads(out.read_text())["max_residual"] > 1e-6


def test_el_curve_config_residual_flat(tmp_path):
    out = tmp_path / "c.csv"
    rc = main(["el", "--config", f"{CONFIGS}/el_curve.cfg",
               "--assert", "1e-10", "--out", str(out)])
    assert rc == 0
    _, header, rows = _read_csv(out)
    assert header == ["t", "residual_1"]
    assert np.max(np.abs(rows[:, 1])) < 1e-12


def test_el_bad_mode_is_config_error(tmp_path):
    p = tmp_path / "bad.cfg"
    p.write_text("el.mode = sideways\n")
    assert main(["el", "--config", str(p)]) == 1


# -------------------------------------------------------------- connection --


def test_connection_demo_config(tmp_path):
    out = tmp_path / "conn.json"
    rc = main(["connection", "--config", f"{CONFIGS}/connection_demo.cfg",
               "--assert", "1e-8", "--out", str(out)])
    assert rc == 0
    payload = json.loads(out.read_text())
    assert payload["checks"]["pairing_residual"] <= 1e-10
    assert payload["checks"]["metricity_residual"] <= 1e-10
    assert set(payload["dual"]) == {"1", "2"}
    assert len(payload["metrical"]["C"]) == payload["k"]
    # order-1 duals are the fibre gradients of the spray components
    assert payload["dual"]["1"][0][0] == "2.0*(x1*y1_1)"
    assert payload["dual"]["1"][0][1] == "0.0"


# ------------------------------------------------------------------- solve --


def test_solve_eigenfunction_config(tmp_path):
    out = tmp_path / "s.csv"
    rc = main(["solve", "--config", f"{CONFIGS}/solve_eigen.cfg", "--out", str(out)])
    assert rc == 0
    _, header, rows = _read_csv(out)
    assert header == ["t", "x1"]
    exact = mittag_leffler(0.5, 1.0)
    assert abs(rows[-1, 1] - exact) < 5e-3


def test_solve_bad_rhs_is_config_error(tmp_path):
    p = tmp_path / "s.cfg"
    p.write_text(
        "solve.alpha = 0.5\nsolve.h = 0.1\nsolve.t_end = 1.0\n"
        "solve.x0 = 1.0\nsolve.rhs.1 = x1 +\n"
    )
    assert main(["solve", "--config", str(p)]) == 1


# ------------------------------------------------------------- determinism --


@pytest.mark.parametrize(
    "argv",
    [
        ["el", "--config", f"{CONFIGS}/el_reference.cfg"],
        ["connection", "--config", f"{CONFIGS}/connection_demo.cfg"],
        ["solve", "--config", f"{CONFIGS}/solve_eigen.cfg"],
        ["deriv", "--expr", "t^2 + t^3.5", "--alpha", "0.6",
         "--grid", "0:1:0.01", "--scheme", "l1"],
    ],
    ids=["el", "connection", "solve", "deriv"],
)
def test_output_is_byte_identical_across_runs(tmp_path, argv):
    a = tmp_path / "a.out"
    b = tmp_path / "b.out"
    assert main(argv + ["--out", str(a)]) == 0
    assert main(argv + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
