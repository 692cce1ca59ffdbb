import json
import os
import subprocess
import sys

import pytest

from jacobisums.cli import ExperimentConfig, config_from_args, main, parse_sequence
from jacobisums.sequences import BoundedSequence


def _run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def _summary(out):
    return dict(line.split(": ", 1) for line in out.strip().splitlines())


def test_sum(capsys):
    code, out, _ = _run(capsys, "sum", "--T", "16", "--z", "2", "--seq-a", "one", "--seq-b", "one")
    s = _summary(out)
    assert code == 0 and s["value"] == "-2" and s["terms"] == "3"
    assert s["mode"] == "exact_integer" and s["guards-passed"] == "true"


def test_cover_check(capsys):
    code, out, _ = _run(capsys, "cover-check", "--T", "1e4", "--z", "9", "--delta", "0.25")
    assert code == 0 and "exact-match: true" in out
    code, out, _ = _run(capsys, "cover-check", "--T", "1e4", "--z", "9", "--delta", "0.5",
                        "--seq-a", "rademacher:1", "--seq-b", "rademacher:2")
    assert code == 0 and _summary(out)["rectangles"] == "30"


def test_asymptotic_json(capsys, tmp_path):
    path = tmp_path / "asym.json"
    code, out, _ = _run(capsys, "asymptotic", "--T", "1e5", "--output", str(path))
    assert code == 0
    rec = json.loads(path.read_text())[0]
    assert rec["total"] == rec["direct"] == rec["N1"] + rec["N2"] - rec["N3"]
    assert rec["CT"] == pytest.approx(1.1729423808 * 1e5)
    assert rec["normalized_error"] == pytest.approx(abs(rec["total"] - rec["CT"]) / 1e5**0.75)
    man = json.loads((tmp_path / "asym.json.manifest.json").read_text())
    assert man["config"]["command"] == "asymptotic" and man["T_int"] == 100_000
    assert {"numpy", "numba", "python"} <= set(man["versions"])
    assert man["wall_time_ms"] > 0
    assert not [p for p in os.listdir(tmp_path) if p.endswith(".tmp")]


def test_perron_scan_csv(capsys, tmp_path):
    path = tmp_path / "p.csv"
    code, out, _ = _run(capsys, "perron-scan", "--T", "200", "--R", "500", "--samples", "30",
                        "--format", "csv", "--output", str(path))
    assert code == 0
    lines = path.read_text().splitlines()
    assert lines[0].startswith("R,") or "observed_error" in lines[0]
    assert len(lines) == 1 + 2 * 30
    assert _summary(out)["flagged"] == "0"


def test_meanvalue(capsys):
    code, out, _ = _run(capsys, "meanvalue", "--M", "2000", "--N", "50", "--seeds", "1,2,3")
    assert code == 0 and float(_summary(out)["max-ratio"]) < 2


def test_meanvalue_guard_failure(capsys):
    code, out, _ = _run(capsys, "meanvalue", "--M", "2000", "--N", "50", "--seeds", "1",
                        "--guard", "1e-9")
    assert code == 1 and "guards-passed: false" in out


def test_lower_bound(capsys):
    code, out, _ = _run(capsys, "lower-bound", "--T", "1e5", "--z", "10")
    s = _summary(out)
    assert code == 0 and s["p"] == "11"


def test_cancellation_scan(capsys, tmp_path):
    svg = tmp_path / "s.svg"
    code, out, _ = _run(capsys, "cancellation-scan", "--T-grid", "1e3,1e4,1e5", "--seeds", "1,2",
                        "--svg", str(svg))
    assert code == 0 and svg.exists()
    assert _summary(out)["alpha_hat"] == "nan"


def test_constant(capsys):
    code, out, _ = _run(capsys, "constant", "--T", "1000")
    assert code == 0 and abs(float(_summary(out)["constant"]) - 1.1729424) < 1e-6


@pytest.mark.parametrize("argv", [
    ["sum", "--z", "1"],
    ["cover-check", "--delta", "0.75"],
    ["sum", "--seq-a", "gauss"],
    ["sum", "--seq-a", "rademacher:abc"],
    ["sum", "--seq-a", "csv:/nonexistent/file.csv"],
    ["frobnicate"],
    ["sum", "--T", "notanumber"],
    ["cancellation-scan", "--T-grid", "1e3,1e4"],
    ["sum", "--threads", "0"],
])
def test_config_errors(capsys, argv):
    code, out, err = _run(capsys, *argv)
    assert code == 2
    lines = err.strip().splitlines()
    assert len(lines) == 1 and lines[0].startswith("error: invalid-config: ")
    json.loads(lines[0].split(": ", 2)[2])


def test_cover_check_z_too_large(capsys):
    code, _, err = _run(capsys, "cover-check", "--T", "1e4", "--z", "200", "--delta", "0.5")
    assert code == 2 and err.startswith("error: invalid-config:")


def test_threads_identical(capsys, tmp_path):
    vals = []
    for t in ("1", "8"):
        path = tmp_path / f"t{t}.json"
        _run(capsys, "sum", "--T", "1e5", "--z", "3", "--seq-a", "rademacher:4",
             "--seq-b", "rademacher:5", "--threads", t, "--output", str(path))
        rec = json.loads(path.read_text())[0]
        vals.append((rec["value_re"], rec["terms"]))
    assert vals[0] == vals[1]


def test_threads_env_default(monkeypatch):
    monkeypatch.setenv("JACOBISUMS_THREADS", "3")
    assert config_from_args(["sum"]).threads == 3


def test_parse_sequence(tmp_path):
    assert parse_sequence("one") == BoundedSequence("constant_one")
    assert parse_sequence("jacobi:auto", z=10) == BoundedSequence("jacobi_character", 11)
    assert parse_sequence("point:13") == BoundedSequence("point_mass", 13)
    f = tmp_path / "a.csv"
    f.write_text("n,re,im\n3,1,0\n")
    assert parse_sequence(f"csv:{f}").values(3).tolist() == [0, 0, 0, 1]


def test_config_roundtrip():
    cfg = config_from_args(["sum", "--T", "1e3", "--z", "4"])
    assert isinstance(cfg, ExperimentConfig) and cfg.T_int == 1000


def test_module_entry_point(tmp_path):
    env = dict(os.environ, NUMBA_THREADING_LAYER="omp")
    p = subprocess.run([sys.executable, "-m", "jacobisums", "sum", "--T", "16", "--z", "2"],
                       capture_output=True, text=True, env=env, cwd=tmp_path)
    assert p.returncode == 0 and "value: -2" in p.stdout
    p = subprocess.run([sys.executable, "-m", "jacobisums", "sum", "--z", "1"],
                       capture_output=True, text=True, env=env, cwd=tmp_path)
    assert p.returncode == 2 and p.stderr.count("\n") == 1
