import pytest

import plot_contour
import plot_decay
import plot_profiles
from figlib import CONTOUR_LEVELS, PlotJob, SchemaError, read_table, render


def test_contour_levels_are_the_nine_loss_lines(contour_csvs, tmp_path):
    out = tmp_path / "contour.png"
    info = render(PlotJob((contour_csvs[1],), "contour", out))
    assert out.exists() and out.stat().st_size > 0
    assert info["levels"] == [pytest.approx(0.1 * k) for k in range(1, 10)]
    assert len(info["levels"]) == 9
    assert list(CONTOUR_LEVELS) == [pytest.approx(0.1 * k) for k in range(1, 10)]


def test_contour_script_cli(contour_csvs, tmp_path):
    out = tmp_path / "contour_cli.png"
    assert plot_contour.main([str(contour_csvs[10]), str(out), "--log-c"]) == 0
    assert out.exists()


def test_profiles_overlay(steady_csvs, tmp_path):
    out = tmp_path / "profiles.png"
    info = render(PlotJob(tuple(steady_csvs), "profiles", out))
    assert out.exists()
    assert len(info["labels"]) == len(steady_csvs) == 3
    assert "destruction limit" in info["labels"]


def test_profiles_script_cli(steady_csvs, tmp_path):
    out = tmp_path / "profiles_cli.png"
    argv = [str(p) for p in steady_csvs] + [str(out)]
    assert plot_profiles.main(argv) == 0
    assert out.exists()


def test_decay_panel_rate(series_csv, tmp_path):
    out = tmp_path / "decay.png"
    info = render(PlotJob((series_csv,), "decay", out, window=(5.0, 30.0)))
    assert out.exists()
    assert 0.3 < info["rate"] < 0.8  # far-above-threshold decay is order one


def test_decay_script_cli(series_csv, tmp_path):
    out = tmp_path / "decay_cli.png"
    assert plot_decay.main([str(series_csv), str(out), "--window", "5", "30"]) == 0
    assert out.exists()


def test_rendering_is_reproducible(contour_csvs, tmp_path):
    a, b = tmp_path / "a.png", tmp_path / "b.png"
    render(PlotJob((contour_csvs[1],), "contour", a))
    render(PlotJob((contour_csvs[1],), "contour", b))
    assert a.read_bytes() == b.read_bytes()


def test_missing_column_fails_fast(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("delta_fraction [-],c [1/time]\n0.1,1.0\n0.2,1.0\n")
    with pytest.raises(SchemaError, match="missing columns"):
        read_table(bad, ("delta_fraction", "c", "ratio"))
    assert plot_contour.main([str(bad), str(tmp_path / "x.png")]) == 2


def test_single_row_table_is_degenerate(tmp_path):
    bad = tmp_path / "single.csv"
    bad.write_text("t [time],sup_norm [density]\n0.0,1.0\n")
    with pytest.raises(SchemaError, match="degenerate"):
        read_table(bad, ("t", "sup_norm"))
    assert plot_decay.main([str(bad), str(tmp_path / "x.png")]) == 2


def test_incomplete_grid_rejected(tmp_path):
    bad = tmp_path / "ragged_grid.csv"
    bad.write_text(
        "delta_fraction [-],c [1/time],ratio [-]\n"
        "0.1,1.0,0.9\n0.1,2.0,0.8\n0.2,1.0,0.7\n"
    )
    with pytest.raises(SchemaError, match="grid"):
        render(PlotJob((bad,), "contour", tmp_path / "x.png"))
