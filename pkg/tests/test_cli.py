import csv
import io
import json
import subprocess
import sys

import pytest

from posop.cli import OUTPUT_ENV, body_bytes, run


def invoke(argv, tmp_path=None):
    out, err = io.StringIO(), io.StringIO()
    if tmp_path is not None:
        argv = ["--out", str(tmp_path), *argv]
    code = run(argv, out, err)
    return code, out.getvalue(), err.getvalue()


def load(path):
    return json.loads(path.read_text())


def test_classical_passes_and_writes(tmp_path):
    code, out, _ = invoke(["classical"], tmp_path)
    assert code == 0
    assert out.startswith("PASS")
    doc = load(tmp_path / "classical.json")
    assert set(doc) == {"header", "body"}
    body = doc["body"]
    assert body["status"] == "PASS" and body["schema_version"] == 1
    assert body["results"]["classical"]["abs_error"] <= 1e-12
    with (tmp_path / "classical_experiment.csv").open() as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 1
    assert {"u1", "u2", "u3", "epsilon", "dq2", "closed_form", "abs_error"} <= set(rows[0])
    assert float(rows[0]["dq2"]) == pytest.approx(-0.288)


def test_inconclusive_exit_code(tmp_path):
    code, out, _ = invoke(["algebra", "--suite", "massless", "--cutoff", "2"], tmp_path)
    assert code == 2
    assert load(tmp_path / "algebra.json")["body"]["status"] == "INCONCLUSIVE"


def test_massive_suite_reports_boost_failure(tmp_path):
    code, _, _ = invoke(["algebra", "--suite", "massive"], tmp_path)
    assert code == 1
    checks = load(tmp_path / "algebra.json")["body"]["results"]["massive"]["checks"]
    by_id = {c["check_id"]: c["status"] for c in checks}
    assert by_id["h-boost"] == "FAIL"
    assert all(s == "PASS" for k, s in by_id.items() if k != "h-boost")


@pytest.mark.parametrize("argv", [
    [],
    ["bogus"],
    ["uncertainty", "--k0", "1,2"],
    ["uncertainty", "--alpha", "-1"],
    ["uncertainty", "--grid", "8"],
    ["fourier", "--sign", "2"],
    ["eigen", "--sigma-ladder", "0.1,-0.05"],
    ["algebra"],
])
def test_usage_errors(argv):
    code, out, err = invoke(argv)
    assert code == 64
    assert "usage" in err and out == ""


def test_library_error_becomes_fail(tmp_path):
    code, out, _ = invoke(["uncertainty", "--kmax", "2", "--grid", "21", "--k0", "0,0,1.5"], tmp_path)
    assert code == 1
    assert "GridTooSmall" in out
    res = load(tmp_path / "uncertainty.json")["body"]["results"]["uncertainty"]
    assert res["error"] == "GridTooSmall"


def test_body_is_byte_identical_across_runs(tmp_path):
    for argv in (["classical", "--u", "0.3,0.4,0.866025403784"], ["algebra", "--suite", "massless", "--cutoff", "2"]):
        invoke(argv, tmp_path / "a")
        invoke(argv, tmp_path / "b")
        name = argv[0] + ".json"
        a, b = load(tmp_path / "a" / name), load(tmp_path / "b" / name)
        assert body_bytes(a) == body_bytes(b)
        assert "timestamp" in a["header"]


def test_output_directory_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv(OUTPUT_ENV, str(tmp_path / "env"))
    code, _, _ = invoke(["classical"])
    assert code == 0
    assert (tmp_path / "env" / "classical.json").exists()


def test_format_selection(tmp_path):
    invoke(["--format", "json", "classical"], tmp_path)
    assert [p.name for p in tmp_path.iterdir()] == ["classical.json"]


def test_no_write(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    code, out, _ = invoke(["--no-write", "classical"])
    assert code == 0 and "wrote" not in out
    assert not any(tmp_path.iterdir())


def test_jacobi_bracket_and_fourier(tmp_path):
    assert invoke(["jacobi-bracket", "--samples", "10"], tmp_path)[0] == 0
    code, _, _ = invoke(["fourier"], tmp_path)
    assert code == 0
    body = load(tmp_path / "fourier.json")["body"]["results"]["fourier"]
    assert abs(body["peak_position"] - 2.0) <= 0.05


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "posop.cli", "--no-write", "classical"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "PASS" in proc.stdout
