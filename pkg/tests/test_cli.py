import json

import pytest

from hablab.cli import main
from hablab.reports import sha256_text

from conftest import SCENARIOS


def run(args, capsys=None):
    code = main([str(a) for a in args])
    if capsys is None:
        return code, None, None
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_eig_pristine_constant_growth(tmp_path, capsys):
    code, out, _ = run(
        ["eig", "--scenario", SCENARIOS / "pristine.toml", "--c", "0",
         "--nodes", "201", "--out", tmp_path, "--json"],
        capsys,
    )
    assert code == 0
    summary = json.loads(out)
    assert summary["eigenvalues"]["0"] == pytest.approx(-1.0, abs=1e-9)
    assert (tmp_path / "eig_mu_c0.csv").exists()
    header = (tmp_path / "eig_mu_c0.csv").read_text().splitlines()[0]
    assert header == "x [length],phi [normalized]"


def test_threshold_cli_summary(tmp_path, capsys):
    code, out, _ = run(
        ["threshold", "--scenario", SCENARIOS / "fast_diffusion.toml",
         "--nodes", "1001", "--out", tmp_path, "--json"],
        capsys,
    )
    assert code == 0
    summary = json.loads(out)
    assert summary["exists"] is True
    assert summary["c0"] == pytest.approx(10.03, rel=0.01)
    assert summary["mu_inf"] == pytest.approx(0.542, abs=5e-3)
    assert summary["c_star"] == pytest.approx(2.0 / 3.0, rel=1e-9)
    assert (tmp_path / "threshold.json").exists()
    assert (tmp_path / "threshold_trace.csv").exists()


def test_manifest_written_and_hash_matches(tmp_path):
    scenario = SCENARIOS / "pristine.toml"
    code, _, _ = run(
        ["eig", "--scenario", scenario, "--c", "0", "--nodes", "201", "--out", tmp_path]
    )
    assert code == 0
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["command"] == "eig"
    assert manifest["scenario_sha256"] == sha256_text(scenario.read_text())
    assert manifest["parameters"]["nodes_per_axis"] == 201
    assert manifest["output_dir"] == str(tmp_path)
    assert manifest["tool_version"] == "0.1.0"
    assert "eig_mu_c0.csv" in manifest["outputs"]
    manifests = [p for p in tmp_path.iterdir() if p.name == "manifest.json"]
    assert len(manifests) == 1


def test_evolve_reruns_are_byte_identical(tmp_path):
    args = [
        "evolve", "--scenario", SCENARIOS / "pristine.toml", "--c", "5",
        "--nodes", "201", "--dt", "0.02", "--t-final", "2.0",
        "--snapshots", "0,1,2",
    ]
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert run(args + ["--out", out1])[0] == 0
    assert run(args + ["--out", out2])[0] == 0
    for name in ("series_c5.csv", "snapshot_c5_t1.csv"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


def test_steady_cli(tmp_path, capsys):
    code, out, _ = run(
        ["steady", "--scenario", SCENARIOS / "fast_diffusion.toml", "--c", "1000",
         "--nodes", "501", "--out", tmp_path, "--json"],
        capsys,
    )
    assert code == 0
    summary = json.loads(out)
    assert summary["states"]["1000"]["classification"] == "extinct"
    header = (tmp_path / "steady_c1000.csv").read_text().splitlines()[0]
    assert header == "x [length],u [density],c [1/time]"


def test_steady_cli_destruction(tmp_path, capsys):
    code, out, _ = run(
        ["steady", "--scenario", SCENARIOS / "slow_diffusion.toml", "--c", "inf",
         "--nodes", "501", "--out", tmp_path, "--json"],
        capsys,
    )
    assert code == 0
    summary = json.loads(out)
    assert summary["states"]["inf"]["classification"] == "persistent"
    assert (tmp_path / "steady_cinf.csv").exists()


def test_contour_cli(tmp_path, capsys):
    code, out, _ = run(
        ["contour", "--scenario", SCENARIOS / "contour_base.toml", "--d", "10",
         "--nodes", "201", "--deltas", "2,6", "--c-grid", "0,1,10",
         "--out", tmp_path, "--json"],
        capsys,
    )
    assert code == 0
    summary = json.loads(out)
    assert summary["cells"] == 6
    lines = (tmp_path / "contour.csv").read_text().splitlines()
    assert lines[0] == "delta_fraction [-],c [1/time],ratio [-]"
    assert len(lines) == 7


def test_sweep_cli(tmp_path, capsys):
    code, out, _ = run(
        ["sweep", "--scenario", SCENARIOS / "slow_diffusion.toml",
         "--nodes", "501", "--out", tmp_path, "--json"],
        capsys,
    )
    assert code == 0
    summary = json.loads(out)
    assert summary["mu_inf"] == pytest.approx(-0.8458, abs=5e-3)
    lines = (tmp_path / "sweep.csv").read_text().splitlines()
    assert lines[0].startswith("c [1/time],mu [1/time],lambda")
    assert len(lines) == 8  # seven finite rates + header


def test_lambda_cli(tmp_path, capsys):
    code, out, _ = run(
        ["lambda", "--scenario", SCENARIOS / "slow_diffusion.toml", "--c", "inf",
         "--nodes", "1001", "--out", tmp_path, "--json"],
        capsys,
    )
    assert code == 0
    summary = json.loads(out)
    import numpy as np

    assert summary["eigenvalues"]["inf"] == pytest.approx(np.pi**2 / 64, abs=1e-3)


def test_validation_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.toml"
    bad.write_text("dim = 1\nomega = [-10.0, 10.0]\nd = 1.0\nsurprise = true\n")
    code, _, err = run(["eig", "--scenario", bad, "--out", tmp_path / "o"], capsys)
    assert code == 2
    assert json.loads(err)["error"] == "ScenarioError"


def test_precondition_error_exit_code(tmp_path, capsys):
    code, _, err = run(
        ["lambda", "--scenario", SCENARIOS / "slow_diffusion.toml", "--c", "0.5",
         "--nodes", "201", "--out", tmp_path],
        capsys,
    )
    assert code == 2
    assert "c_star" in json.loads(err)["message"]


def test_solver_error_exit_code(tmp_path, capsys):
    code, _, err = run(
        ["evolve", "--scenario", SCENARIOS / "pristine.toml", "--nodes", "201",
         "--dt", "60", "--t-final", "240", "--out", tmp_path],
        capsys,
    )
    assert code == 3
    assert json.loads(err)["error"] == "StabilityError"


def test_missing_scenario_exit_code(tmp_path, capsys):
    code, _, err = run(["eig", "--scenario", tmp_path / "nope.toml", "--out", tmp_path], capsys)
    assert code == 2
