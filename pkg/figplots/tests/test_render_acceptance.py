"""Secondary exit criterion: the three-panel set regenerates from
primary-emitted CSVs with zero schema errors, and the contour panel draws
exactly the nine 10%-loss level lines."""

import plot_contour
import plot_profiles


def test_three_panel_set(contour_csvs, steady_csvs, tmp_path, capsys):
    panels = {
        "contour_d1.png": [str(contour_csvs[1]), str(tmp_path / "contour_d1.png"), "--log-c"],
        "contour_d10.png": [str(contour_csvs[10]), str(tmp_path / "contour_d10.png"), "--log-c"],
    }
    for name, argv in panels.items():
        assert plot_contour.main(argv) == 0, name
        assert (tmp_path / name).stat().st_size > 0
        out = capsys.readouterr().out
        assert "9 level lines" in out
    profile_argv = [str(p) for p in steady_csvs] + [str(tmp_path / "profiles.png")]
    assert plot_profiles.main(profile_argv) == 0
    assert (tmp_path / "profiles.png").stat().st_size > 0
    print("SECONDARY ACCEPTANCE PASS: three-panel set regenerated, nine level lines")
