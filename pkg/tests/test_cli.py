import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from spectral_bracket.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def parse_csv(text):
    lines = text.splitlines()
    assert lines[0] == "# schema=v1"
    rows = list(csv.reader(io.StringIO("\n".join(lines[1:]))))
    return rows[0], rows[1:]


def test_discriminant_zero_csv(capsys):
    code, out, _ = run(capsys, "discriminant", "--potential", "zero", "--range", "-3", "3",
                       "--samples", "61", "--format", "csv")
    assert code == 0
    header, rows = parse_csv(out)
    assert header[:3] == ["lambda", "Delta_re", "Delta_im"]
    lam = np.array([float(r[0]) for r in rows])
    d = np.array([float(r[1]) for r in rows])
    assert len(rows) == 61
    assert np.max(np.abs(d - np.cos(np.pi * lam))) < 1e-10


def test_discriminant_empty_range(capsys):
    code, out, _ = run(capsys, "discriminant", "--range", "1", "1", "--format", "csv")
    assert code == 0
    header, rows = parse_csv(out)
    assert rows == []


def test_discriminant_one_gap_peak(capsys):
    code, out, _ = run(capsys, "discriminant", "--potential", "one-gap", "--range", "0", "2",
                       "--samples", "201")
    doc = json.loads(out)
    assert code == 0 and doc["schema"] == "v1"
    peak = max(abs(r[1]) for r in doc["rows"])
    assert abs(peak - np.cosh(np.pi)) < 1e-6 * np.cosh(np.pi)


def test_spectrum_reports(capsys):
    code, out, _ = run(capsys, "spectrum", "--potential", "zero", "--range", "-2.5", "2.5")
    rep = json.loads(out)["report"]
    assert code == 0
    assert rep["gaps"] == []
    pts = rep["periodic_points"] + rep["antiperiodic_points"]
    assert all(p["classification"] == "double" for p in pts) and len(pts) == 5
    code, out, _ = run(capsys, "spectrum", "--potential", "one-gap", "--range", "-2.5", "4.5")
    gaps = json.loads(out)["report"]["gaps"]
    assert len(gaps) == 1
    np.testing.assert_allclose(gaps[0], [0, 2], atol=1e-8)


def test_spectrum_deterministic(capsys, monkeypatch):
    args = ("spectrum", "--potential", "two-mode", "--range", "-3", "3")
    a = run(capsys, *args)[1]
    monkeypatch.setenv("SPECTRAL_BRACKET_THREADS", "3")
    b = run(capsys, *args)[1]
    assert a == b


def test_weyl_csv(capsys):
    code, out, _ = run(capsys, "weyl", "--potential", "zero", "--lam", "0.5", "-0.3", "--sheet", "minus",
                       "--format", "csv")
    header, rows = parse_csv(out)
    assert code == 0 and header[0] == "x"
    assert all(float(r[1]) == 0 and float(r[2]) == 0 for r in rows)


def test_verify_rpb_zero(capsys):
    code, out, _ = run(capsys, "verify", "--which", "rpb", "--potential", "zero", "--pairs", "2")
    doc = json.loads(out)
    assert code == 0 and doc["passed"]
    assert max(r["residual"] for r in doc["suites"]["rpb"]) <= 1e-9


def test_verify_ah_one_gap(capsys):
    code, out, _ = run(capsys, "verify", "--which", "ah", "--potential", "one-gap", "--pairs", "2")
    doc = json.loads(out)
    assert code == 0
    assert all(r["residual"] <= 1e-6 for r in doc["suites"]["ah"] if r["name"] != "ah_degeneration")


def test_verify_byte_identical_with_threads(capsys, monkeypatch):
    args = ("verify", "--which", "popd", "--potential", "one-gap", "--pairs", "3", "--seed", "5")
    monkeypatch.setenv("SPECTRAL_BRACKET_THREADS", "1")
    a = run(capsys, *args)
    monkeypatch.setenv("SPECTRAL_BRACKET_THREADS", "4")
    b = run(capsys, *args)
    assert a == b and a[0] == 0


def test_invalid_which_is_usage_error(capsys):
    code, _, err = run(capsys, "verify", "--which", "nope")
    assert code == 2 and "invalid choice" in err


def test_config_parse_error_reports_position(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text('{\n  "grid": 512,\n  "tol": \n}\n')
    code, _, err = run(capsys, "spectrum", "--config", str(cfg))
    assert code == 2
    assert "line 4" in err and "column 1" in err


def test_config_validation(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"tol": -1}))
    assert run(capsys, "spectrum", "--config", str(cfg))[0] == 2
    cfg.write_text(json.dumps({"bogus": 1}))
    assert run(capsys, "spectrum", "--config", str(cfg))[0] == 2
    assert run(capsys, "spectrum", "--config", str(tmp_path / "missing.json"))[0] == 2
    assert run(capsys, "spectrum", "--potential", "not-a-preset")[0] == 2


def test_flags_override_config(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"potential": "one-gap", "lambda_range": [0, 1], "samples": 3, "format": "json"}))
    code, out, _ = run(capsys, "discriminant", "--config", str(cfg), "--format", "csv")
    header, rows = parse_csv(out)
    assert code == 0 and len(rows) == 3


def test_inline_potential_and_out_file(tmp_path, capsys):
    pot = json.dumps({"l": 1.0, "coeffs": [{"k": 1, "re": 0.2, "im": 0.0}]})
    out = tmp_path / "d.csv"
    code, text, _ = run(capsys, "discriminant", "--potential", pot, "--range", "0", "1", "--samples", "5",
                        "--format", "csv", "--out", str(out))
    assert code == 0 and text == ""
    assert out.read_text().startswith("# schema=v1")


def test_toda_command(capsys):
    code, out, _ = run(capsys, "toda", "--seed", "2")
    doc = json.loads(out)
    assert code == 0 and doc["passed"]
    assert [len(s["eigenvalues"]) for s in doc["states"]] == [2, 3, 4, 6]


def test_toda_state_from_config(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"toda_state": {"N": 2, "q": [0, 0], "p": [0, 0]}}))
    code, out, _ = run(capsys, "toda", "--config", str(cfg))
    doc = json.loads(out)
    assert code == 0
    np.testing.assert_allclose(doc["states"][0]["eigenvalues"], [-1, 1], atol=1e-14)


def test_onegap_check(capsys):
    code, out, _ = run(capsys, "onegap-check")
    doc = json.loads(out)
    assert code == 0 and doc["passed"]
    assert run(capsys, "onegap-check", "--potential", "two-mode")[0] == 2


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "spectral_bracket", "discriminant", "--range", "0", "0"],
                       capture_output=True, text=True)
    assert r.returncode == 0
    assert json.loads(r.stdout)["rows"] == []
