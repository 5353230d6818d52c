import csv
import json

import numpy as np
import pytest

from modkg import io as mio
from modkg.cli import run
from modkg.grid import Field, GridSpec


def test_admissible_cli_reports_theorem3_failure(tmp_path, capsys):
    code = run(["admissible", "--n", "3", "--theta", "1", "--k", "4"])
    assert code == 2
    rep = json.loads(capsys.readouterr().out)
    t3 = [r for r in rep["results"] if r["name"] == "Theorem3"][0]
    assert t3["status"] == "FAIL"
    assert t3["failed"]["name"] == "k > 4/theta + 2/n"
    assert t3["failed"]["rhs_exact"] == "14/3"


def test_admissible_passing_exit_zero(tmp_path):
    out = tmp_path / "r.json"
    code = run(["admissible", "--n", "3", "--q", "3/2", "--k", "5/2", "--s", "7/5", "--p", "4", "--out", str(out)])
    assert code == 0
    assert json.loads(out.read_text())["results"]


def test_admissible_sweep(tmp_path):
    ini = tmp_path / "grid.ini"
    ini.write_text("[grid]\nn = 1 3\np = 2, 4\nq = 3/2\nk = 5/2\ns = 7/5\n")
    out = tmp_path / "s.csv"
    assert run(["admissible", "--sweep", str(ini), "--out", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 5


def test_plane_wave_solve(tmp_path):
    out = tmp_path / "run"
    code = run(["solve", "--n", "1", "--L", "64", "--N", "256", "--plane-wave", "3",
                "--nonlinearity", "none", "--T", "1", "--M", "16", "--out", str(out)])
    assert code == 0
    rows = list(csv.DictReader(open(out / "diagnostics.csv")))
    assert rows[-1]["sweep"] == "final"
    assert float(rows[-1]["residual"]) <= 1e-12
    traj = mio.read_trajectory(out)
    assert len(traj) == 17 and traj.ut is not None


def test_config_file_and_override(tmp_path):
    ini = tmp_path / "c.ini"
    ini.write_text("[solve]\nn = 1\nL = 64\nN = 128\nnonlinearity = none\nplane-wave = 2\nT = 0.5\nM = 4\n")
    out = tmp_path / "a"
    assert run(["solve", "--config", str(ini), "--out", str(out)]) == 0
    traj = mio.read_trajectory(out)
    assert traj.spec == GridSpec(1, 64.0, 128) and len(traj) == 5
    out2 = tmp_path / "b"
    assert run(["solve", "--config", str(ini), "--M", "8", "--out", str(out2)]) == 0
    assert len(mio.read_trajectory(out2)) == 9


def test_propagate_norm_decompose(tmp_path, capsys):
    spec = GridSpec(1, 64.0, 256)
    src = tmp_path / "u.mkgf"
    mio.write_field(src, Field.from_function(spec, lambda x: np.exp(-x ** 2)))
    dst = tmp_path / "v.mkgf"
    assert run(["propagate", "--in", str(src), "--out", str(dst), "--kind", "Kp", "--t", "0"]) == 0
    np.testing.assert_allclose(mio.read_field(dst).values, mio.read_field(src).values, atol=1e-14)
    assert run(["norm", "--in", str(src), "--sobolev", "--s", "0"]) == 0
    kind, value = capsys.readouterr().out.split()
    l2 = (np.pi / 2) ** 0.25
    assert kind == "sobolev" and float(value) == pytest.approx(l2, rel=1e-10)
    bands = tmp_path / "bands"
    assert run(["decompose", "--in", str(src), "--out", str(bands)]) == 0
    rows = list(csv.DictReader(open(bands / "index.csv")))
    total = sum(mio.read_field(bands / r["file"]).values for r in rows)
    np.testing.assert_allclose(total, mio.read_field(src).values, atol=1e-12)


def test_verify_cli_is_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["verify", "--inequality", "2.1", "--count", "6", "--no-refine"]
    assert run(args + ["--out", str(a)]) == 0
    assert run(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    row = list(csv.DictReader(open(a)))[0]
    assert row["id"] == "2.1" and row["verdict"] == "BOUNDED"


@pytest.mark.parametrize(
    "argv,code",
    [
        (["verify", "--inequality", "2.7", "--k", "3", "--count", "2", "--no-refine"], 2),
        (["solve", "--L", "32", "--N", "64", "--nonlinearity", "none", "--out", "x"], 1),
        (["solve", "--N", "24", "--nonlinearity", "none", "--out", "x"], 1),
        (["norm", "--in", "/nonexistent.mkgf"], 1),
        (["nosuchcommand"], 1),
        (["admissible", "--n", "3", "--theta", "2"], 1),
    ],
)
def test_exit_codes(tmp_path, monkeypatch, argv, code):
    monkeypatch.chdir(tmp_path)
    assert run(argv) == code
