import json
import os
import subprocess
import sys

import numpy as np
import pytest

from rfspectrum.cli import run
from rfspectrum.features import matrix_from_csv


def write_config(tmp_path, obj, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


def test_bounds_theorem1(tmp_path, capsys):
    cfg = write_config(tmp_path, {"theorem": "thm1", "d": 10, "m": 100, "N": 5000, "gamma": 1,
                                  "sigma": 3, "eta": 0.5, "delta": 0.05})
    out = tmp_path / "out"
    assert run(["bounds", "--config", cfg, "--out", str(out)]) == 0
    report = json.loads((out / "bounds.json").read_text())
    verdicts = {c["name"]: c["holds"] for c in report["conditions"]}
    assert verdicts["variance_product"] is False
    assert "variance_product" in capsys.readouterr().out


def test_figure1_tiny(tmp_path):
    out = tmp_path / "out"
    code = run(["figure1", "--out", str(out), "--threads", "1",
                "--set", "trials=1", "--set", "d_grid=[2]", "--set", "sigma_grid=[3]",
                "--set", "m=10", "--set", "N=100"])
    assert code == 0
    lines = (out / "fig1_extreme_sv_vs_d.csv").read_text().splitlines()
    assert lines[0].startswith("# config: ")
    body = [ln.split(",") for ln in lines[2:]]
    assert [r[2] for r in body] == ["0", "mean", "std"]
    assert all(float(v) == 0.0 for v in body[2][3:])
    svg = (out / "fig1_extreme_sv_vs_d.svg").read_text()
    assert svg.lstrip().startswith("<?xml") and "<svg" in svg
    assert sorted(os.listdir(out)) == ["fig1_extreme_sv_vs_d.csv", "fig1_extreme_sv_vs_d.svg"]


def test_figure2_writes_plot(tmp_path):
    out = tmp_path / "out"
    code = run(["figure2", "--out", str(out), "--threads", "2",
                "--set", "trials=1", "--set", "d_grid=[3, 6]", "--set", "m=8",
                "--set", "N_grid=[20, 60]"])
    assert code == 0
    assert (out / "fig2_sv_distribution_vs_N.svg").exists()


def test_missing_config(tmp_path, capsys):
    out = tmp_path / "out"
    assert run(["bounds", "--config", str(tmp_path / "nope.json"), "--out", str(out)]) == 2
    err = capsys.readouterr().err.strip()
    assert len(err.splitlines()) == 1 and "nope.json" in err
    assert not out.exists() or os.listdir(out) == []


def test_invalid_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    assert run(["verify", "--config", str(path), "--out", str(tmp_path / "o")]) == 2


def test_unknown_subcommand(capsys):
    assert run(["figure9"]) == 2


def test_unknown_key_leaves_no_files(tmp_path):
    out = tmp_path / "out"
    assert run(["figure1", "--out", str(out), "--set", "bogus=1"]) == 2
    assert not out.exists() or os.listdir(out) == []


def test_verify_outputs(tmp_path, capsys):
    cfg = write_config(tmp_path, {"experiment": "verify_thm4", "m_grid": [100], "N": 10,
                                  "d_grid": [5], "trials": 2})
    out = tmp_path / "out"
    assert run(["verify", "--config", cfg, "--out", str(out)]) == 0
    assert (out / "verify_thm4.csv").exists()
    payload = json.loads((out / "verify_thm4_bounds.json").read_text())
    assert payload[0]["report"]["theorem_id"] == "thm4"
    assert "sample_count" in capsys.readouterr().out


def test_verify_needs_verify_experiment(tmp_path):
    cfg = write_config(tmp_path, {"experiment": "fig1_extreme_sv_vs_d"})
    assert run(["verify", "--config", cfg, "--out", str(tmp_path / "o")]) == 2


def test_kernel_output(tmp_path):
    out = tmp_path / "out"
    assert run(["kernel", "--out", str(out), "--set", "kind=full_gaussian", "--set", "n=3",
                "--set", "d=2"]) == 0
    K = matrix_from_csv((out / "kernel.csv").read_text())
    np.testing.assert_allclose(K, [[1, 0.5, 0.5], [0.5, 1, 0.5], [0.5, 0.5, 1]], atol=1e-15)


def test_spectrum_output(tmp_path, capsys):
    out = tmp_path / "out"
    assert run(["spectrum", "--out", str(out), "--seed", "3", "--set", "m=5",
                "--set", "N=50", "--set", "d=4"]) == 0
    lines = (out / "spectrum.csv").read_text().splitlines()
    assert json.loads(lines[0][len("# config: "):])["seed"] == 3
    values = [float(ln.split(",")[1]) for ln in lines[2:]]
    assert len(values) == 5 and values == sorted(values)
    assert "condition_number" in capsys.readouterr().out


def test_idempotent(tmp_path):
    args = ["figure1", "--set", "trials=2", "--set", "d_grid=[4]", "--set", "m=6",
            "--set", "N=40"]
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(args + ["--out", str(a), "--threads", "1"]) == 0
    assert run(args + ["--out", str(b), "--threads", "3"]) == 0
    for name in ("fig1_extreme_sv_vs_d.csv", "fig1_extreme_sv_vs_d.svg"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "rfspectrum", "bounds", "--out", str(tmp_path),
         "--set", "theorem=chi2", "--set", "z=0.5", "--set", "d=2"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert json.loads((tmp_path / "bounds.json").read_text())["conclusion_bound"] == pytest.approx(
        0.8243606353500641)
