"""Fixtures generate real inputs by invoking the hablab CLI on small
grids, so the scripts are exercised against the documented interfaces."""

import subprocess
import sys
from pathlib import Path

import pytest

FIGPLOTS = Path(__file__).parents[1]
sys.path.insert(0, str(FIGPLOTS))


def run_cli(args, cwd=None):
    proc = subprocess.run(
        [sys.executable, "-m", "hablab.cli", *[str(a) for a in args]],
        capture_output=True,
        text=True,
        cwd=cwd,
    )
    assert proc.returncode == 0, proc.stderr
    return proc


@pytest.fixture(scope="session")
def scenario_dir(tmp_path_factory):
    path = tmp_path_factory.mktemp("scenarios")
    (path / "flat.toml").write_text(
        'dim = 1\nomega = [-10.0, 10.0]\nb = []\nd = 1.0\nm_default = 1.0\nc = [0.0]\n'
    )
    (path / "hole.toml").write_text(
        'dim = 1\nomega = [-10.0, 10.0]\nb = [[-6.0, 6.0]]\nd = 1.0\n'
        'm_default = 1.0\nc = [1.0, 100.0, "inf"]\n'
    )
    return path


@pytest.fixture(scope="session")
def contour_csvs(tmp_path_factory, scenario_dir):
    """Small contour tables for both diffusion rates."""
    paths = {}
    for d in (1, 10):
        out = tmp_path_factory.mktemp(f"contour_d{d}")
        run_cli(
            [
                "contour", "--scenario", scenario_dir / "flat.toml",
                "--d", d, "--nodes", "201",
                "--deltas", "2,4,6,8", "--c-grid", "0,1,10,1000",
                "--out", out,
            ]
        )
        paths[d] = out / "contour.csv"
    return paths


@pytest.fixture(scope="session")
def steady_csvs(tmp_path_factory, scenario_dir):
    """Steady profiles for the 60%-removed landscape at several rates."""
    out = tmp_path_factory.mktemp("steady")
    run_cli(
        ["steady", "--scenario", scenario_dir / "hole.toml", "--nodes", "401", "--out", out]
    )
    return sorted(out.glob("steady_c*.csv"))


@pytest.fixture(scope="session")
def series_csv(tmp_path_factory, scenario_dir):
    """Decaying time series (d = 10, c far above the threshold)."""
    out = tmp_path_factory.mktemp("series")
    run_cli(
        [
            "evolve", "--scenario", scenario_dir / "hole.toml",
            "--d", "10", "--c", "1000", "--nodes", "401",
            "--t-final", "30", "--norm-stride", "10", "--out", out,
        ]
    )
    return out / "series_c1000.csv"
