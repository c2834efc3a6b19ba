"""Deterministic CSV/JSON artifact writers and the run manifest.

Floats are rendered with `repr`, the shortest round-trip form, so re-runs
with identical inputs produce byte-identical files.  Every CSV starts with
a header row naming columns and units.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .analysis import ContourRow, SweepReport, ThresholdReport
from .dynamics import SteadyState, TimeSeries
from .fields import Field
from .landscape import Destruction
from .spectral import EigenResult


def fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(fmt(v) for v in row) for row in rows)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def json_dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n"


def write_json(path: Path, obj) -> None:
    path.write_text(json_dumps(obj), encoding="utf-8")


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def c_label(c) -> str:
    if isinstance(c, Destruction):
        return "inf"
    return f"{float(c):g}".replace("+", "")


def _coord_header(dim: int) -> list[str]:
    return ["x [length]"] if dim == 1 else ["x [length]", "y [length]"]


def field_rows(field: Field, extra: Sequence = ()) -> Iterable[Sequence]:
    coords = field.grid.coords()
    for i in range(field.grid.n_nodes):
        yield (*coords[i], field.values[i], *extra)


def write_eigenpair(result: EigenResult, csv_path: Path, json_path: Path) -> None:
    grid = result.eigenfunction.grid
    write_csv(
        csv_path,
        _coord_header(grid.dim) + ["phi [normalized]"],
        field_rows(result.eigenfunction),
    )
    write_json(
        json_path,
        {
            "kind": result.kind,
            "value": result.value,
            "residual": result.residual,
            "normalization": result.normalization,
            "iterations": result.iterations,
            "c": None if result.c is None else result.c,
        },
    )


def write_timeseries(series: TimeSeries, path: Path) -> None:
    write_csv(
        path,
        [
            "t [time]",
            "sup_norm [density]",
            "l2_norm [density*length^(1/2)]",
            "mean_density [density]",
        ],
        zip(series.times, series.sup_norm, series.l2_norm, series.mean_density),
    )


def write_snapshot(field: Field, path: Path) -> None:
    write_csv(
        path,
        _coord_header(field.grid.dim) + ["u [density]"],
        field_rows(field),
    )


def write_steady(state: SteadyState, c, csv_path: Path, json_path: Path) -> None:
    grid = state.u.grid
    c_num = float("inf") if isinstance(c, Destruction) else float(c)
    write_csv(
        csv_path,
        _coord_header(grid.dim) + ["u [density]", "c [1/time]"],
        field_rows(state.u, extra=(c_num,)),
    )
    write_json(
        json_path,
        {
            "classification": state.classification,
            "residual": state.residual,
            "mu": state.mu,
            "march_steps": state.march_steps,
            "newton_iterations": state.newton_iterations,
            "newton_fallback": state.newton_fallback,
            "c": "inf" if isinstance(c, Destruction) else float(c),
            "sup_norm": state.u.sup_norm(),
            "mean_density": state.u.mean_density(),
        },
    )


def threshold_summary(report: ThresholdReport) -> dict:
    return {
        "exists": report.exists,
        "c0": report.c0,
        "mu_inf": report.mu_infinity,
        "c_star": report.c_star_lower_bound,
        "bracket": list(report.bracket) if report.bracket else None,
        "bracket_mu": list(report.bracket_mu) if report.bracket_mu else None,
        "bisection_iterations": report.bisection_iterations,
        "decay_rate_probe": report.decay_rate_probe,
        "probe_c": report.probe_c,
    }


def write_threshold(report: ThresholdReport, csv_path: Path, json_path: Path) -> None:
    write_csv(
        csv_path,
        [
            "iteration [-]",
            "c_lo [1/time]",
            "c_hi [1/time]",
            "c_mid [1/time]",
            "mu_mid [1/time]",
        ],
        (
            (i, lo, hi, mid, mu)
            for i, (lo, hi, mid, mu) in enumerate(report.trace)
        ),
    )
    write_json(json_path, threshold_summary(report))


def sweep_summary(report: SweepReport) -> dict:
    return {
        "mu_inf": report.mu_infinity,
        "lambda_inf": report.lambda_infinity,
        "u_inf_sup": report.u_infinity_sup,
        "u_inf_mean": report.u_infinity_mean,
        "empirical_mu_order": report.empirical_mu_order,
        "n_rows": len(report.rows),
    }


def write_sweep(report: SweepReport, csv_path: Path, json_path: Path) -> None:
    write_csv(
        csv_path,
        [
            "c [1/time]",
            "mu [1/time]",
            "lambda [time/length^2]",
            "steady_gap_sup [density]",
            "eig_gap_h1 [-]",
            "mean_density [density]",
        ],
        (
            (r.c, r.mu, r.lam, r.steady_gap_sup, r.eig_gap_h1, r.mean_density)
            for r in report.rows
        ),
    )
    write_json(json_path, sweep_summary(report))


def write_contour(rows: Sequence[ContourRow], csv_path: Path) -> None:
    write_csv(
        csv_path,
        ["delta_fraction [-]", "c [1/time]", "ratio [-]"],
        ((r.delta_fraction, r.c, r.ratio) for r in rows),
    )


def write_manifest(
    out_dir: Path,
    command: str,
    scenario_path: Path,
    scenario_text: str,
    parameters: Mapping,
    outputs: Sequence[str],
    version: str,
) -> None:
    write_json(
        out_dir / "manifest.json",
        {
            "command": command,
            "scenario_path": str(scenario_path),
            "scenario_sha256": sha256_text(scenario_text),
            "output_dir": str(out_dir),
            "parameters": dict(parameters),
            "outputs": sorted(outputs),
            "tool_version": version,
        },
    )
