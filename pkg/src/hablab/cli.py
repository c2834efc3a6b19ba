"""Single executable exposing all workflows on scenario files.

Subcommands: eig, lambda, steady, evolve, threshold, sweep, contour.
Exit codes: 0 success, 2 validation error, 3 solver non-convergence;
machine-readable error JSON goes to stderr.  Outputs are CSV/JSON files
under --out plus one manifest per run; re-running with identical inputs
reproduces byte-identical CSVs.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import contour_table, find_extinction_threshold, sweep_c
from .discretize import build_grid
from .dynamics import EvolutionProblem, default_initial, evolve, steady_state
from .errors import DataError, GridError, ScenarioError, SolverError
from .landscape import DESTRUCTION, Destruction, build_landscape
from .reports import (
    c_label,
    sweep_summary,
    threshold_summary,
    write_contour,
    write_eigenpair,
    write_json,
    write_manifest,
    write_snapshot,
    write_steady,
    write_sweep,
    write_threshold,
    write_timeseries,
)
from .spectral import lambda_degradation, lambda_destruction, mu_degradation, mu_destruction

DEFAULT_NODES_1D = 2001
DEFAULT_NODES_2D = 201
TOLERANCES = {
    "eig_residual_scale": 1e-8,
    "march_rate_tol": 1e-8,
    "newton_tol": 1e-10,
    "extinction_tol": 1e-6,
    "threshold_rel_bracket_tol": 1e-4,
}


def _parse_c_flag(raw: str):
    if raw == "inf":
        return DESTRUCTION
    return float(raw)


def _float_list(raw: str) -> tuple[float, ...]:
    return tuple(float(tok) for tok in raw.split(",") if tok.strip())


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hablab",
        description="Habitat degradation/destruction numerical laboratory",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--scenario", required=True, type=Path, help="scenario TOML file")
        p.add_argument("--out", type=Path, default=Path("hablab_out"), help="output directory")
        p.add_argument("--nodes", type=int, default=None, help="nodes per axis (default 2001 in 1D, 201 in 2D)")
        p.add_argument("--dt", type=float, default=0.01, help="time step")
        p.add_argument("--t-final", type=float, default=50.0, help="integration horizon")
        p.add_argument("--c", type=_parse_c_flag, default=None, help='degradation rate override (number or "inf")')
        p.add_argument("--d", type=float, default=None, help="diffusion override")
        p.add_argument("--json", action="store_true", help="print the summary JSON to stdout")

    for name, desc in (
        ("eig", "principal eigenpairs of the linearized problems"),
        ("lambda", "principal eigenvalues of the indefinite-weight problems"),
        ("steady", "steady states with persistence classification"),
        ("evolve", "time integration with sampled norms"),
        ("threshold", "extinction-threshold report"),
        ("sweep", "convergence table along the degradation rates"),
        ("contour", "mean steady-state density over (habitat fraction, c)"),
    ):
        p = sub.add_parser(name, help=desc)
        common(p)
        if name == "evolve":
            p.add_argument("--snapshots", type=_float_list, default=(), help="comma-separated snapshot times")
            p.add_argument("--norm-stride", type=int, default=1, help="steps between norm samples")
        if name == "threshold":
            p.add_argument("--probe-decay", action="store_true", help="fit the decay rate at c = 2*c0")
        if name == "contour":
            p.add_argument(
                "--deltas",
                type=_float_list,
                default=tuple(np.arange(0.5, 10.0, 0.5)),
                help="half-widths of the centered degraded interval",
            )
            p.add_argument(
                "--c-grid",
                type=_float_list,
                default=tuple(10.0 ** np.linspace(-2, 6, 17)),
                help="degradation rates for the table",
            )
    return parser


def _resolve(args):
    scenario_text = args.scenario.read_text(encoding="utf-8")
    landscape = build_landscape(scenario_text)
    if args.d is not None:
        if not args.d > 0:
            raise ScenarioError("diffusion override must be positive")
        landscape = replace(landscape, diffusion=args.d)
    if args.c is not None:
        landscape = replace(landscape, c_values=(args.c,)).validate()
    nodes = args.nodes
    if nodes is None:
        nodes = DEFAULT_NODES_1D if landscape.dim == 1 else DEFAULT_NODES_2D
    grid = build_grid(landscape, nodes)
    return scenario_text, landscape, grid, nodes


def _parameters(args, nodes: int) -> dict:
    params = {
        "nodes_per_axis": nodes,
        "dt": args.dt,
        "t_final": args.t_final,
        "c_override": "inf" if isinstance(args.c, Destruction) else args.c,
        "d_override": args.d,
        "tolerances": TOLERANCES,
    }
    if hasattr(args, "snapshots"):
        params["snapshots"] = list(args.snapshots)
        params["norm_stride"] = args.norm_stride
    if hasattr(args, "deltas"):
        params["deltas"] = list(args.deltas)
        params["c_grid"] = list(args.c_grid)
    if hasattr(args, "probe_decay"):
        params["probe_decay"] = args.probe_decay
    return params


def _emit(args, out_dir: Path, summary: dict) -> None:
    if args.json:
        sys.stdout.write(json.dumps(summary, sort_keys=True) + "\n")


def _cmd_eig(args, landscape, grid, out_dir: Path) -> tuple[dict, list[str]]:
    outputs = []
    summary = {"eigenvalues": {}}
    for c in landscape.c_values:
        if isinstance(c, Destruction):
            res = mu_destruction(grid, landscape.diffusion)
        else:
            res = mu_degradation(grid, landscape.diffusion, c)
        label = c_label(c)
        csv_path = out_dir / f"eig_mu_c{label}.csv"
        json_path = out_dir / f"eig_mu_c{label}.json"
        write_eigenpair(res, csv_path, json_path)
        outputs += [csv_path.name, json_path.name]
        summary["eigenvalues"][label] = res.value
    return summary, outputs


def _cmd_lambda(args, landscape, grid, out_dir: Path) -> tuple[dict, list[str]]:
    outputs = []
    summary = {"eigenvalues": {}}
    for c in landscape.c_values:
        if isinstance(c, Destruction):
            res = lambda_destruction(grid)
        else:
            res = lambda_degradation(grid, c)
        label = c_label(c)
        csv_path = out_dir / f"eig_lambda_c{label}.csv"
        json_path = out_dir / f"eig_lambda_c{label}.json"
        write_eigenpair(res, csv_path, json_path)
        outputs += [csv_path.name, json_path.name]
        summary["eigenvalues"][label] = res.value
    return summary, outputs


def _cmd_steady(args, landscape, grid, out_dir: Path) -> tuple[dict, list[str]]:
    outputs = []
    summary = {"states": {}}
    for c in landscape.c_values:
        state = steady_state(grid, landscape.diffusion, c, dt=args.dt)
        label = c_label(c)
        csv_path = out_dir / f"steady_c{label}.csv"
        json_path = out_dir / f"steady_c{label}.json"
        write_steady(state, c, csv_path, json_path)
        outputs += [csv_path.name, json_path.name]
        summary["states"][label] = {
            "classification": state.classification,
            "mu": state.mu,
            "mean_density": state.u.mean_density(),
        }
    return summary, outputs


def _cmd_evolve(args, landscape, grid, out_dir: Path) -> tuple[dict, list[str]]:
    outputs = []
    summary = {"runs": {}}
    u0 = default_initial(grid)
    for c in landscape.c_values:
        problem = EvolutionProblem(
            grid=grid,
            d=landscape.diffusion,
            c=c,
            u0=u0,
            dt=args.dt,
            t_final=args.t_final,
            norm_stride=args.norm_stride,
            snapshot_times=args.snapshots,
        )
        series = evolve(problem)
        label = c_label(c)
        csv_path = out_dir / f"series_c{label}.csv"
        write_timeseries(series, csv_path)
        outputs.append(csv_path.name)
        for t, snap in series.snapshots:
            snap_path = out_dir / f"snapshot_c{label}_t{t:g}.csv"
            write_snapshot(snap, snap_path)
            outputs.append(snap_path.name)
        summary["runs"][label] = {
            "final_sup": float(series.sup_norm[-1]),
            "clip_total": series.clip_total,
            "samples": int(series.times.size),
        }
    return summary, outputs


def _cmd_threshold(args, landscape, grid, out_dir: Path) -> tuple[dict, list[str]]:
    report = find_extinction_threshold(
        grid, landscape.diffusion, probe_decay=args.probe_decay, dt=args.dt
    )
    csv_path = out_dir / "threshold_trace.csv"
    json_path = out_dir / "threshold.json"
    write_threshold(report, csv_path, json_path)
    return threshold_summary(report), [csv_path.name, json_path.name]


def _cmd_sweep(args, landscape, grid, out_dir: Path) -> tuple[dict, list[str]]:
    finite = landscape.finite_c()
    cs = tuple(sorted(set(finite))) if finite else tuple(10.0 ** np.arange(0, 7))
    report = sweep_c(grid, landscape.diffusion, cs, dt=args.dt)
    csv_path = out_dir / "sweep.csv"
    json_path = out_dir / "sweep.json"
    write_sweep(report, csv_path, json_path)
    return sweep_summary(report), [csv_path.name, json_path.name]


def _cmd_contour(args, landscape, grid, out_dir: Path) -> tuple[dict, list[str]]:
    if not landscape.growth.is_constant:
        raise ScenarioError("contour tables require a constant growth profile")
    if landscape.dim != 1:
        raise ScenarioError("contour tables are defined for 1D scenarios")
    rows = contour_table(
        landscape.diffusion,
        args.deltas,
        args.c_grid,
        nodes=args.nodes,
        omega=(landscape.omega.lo[0], landscape.omega.hi[0]),
        growth=landscape.growth.default,
        dt=args.dt,
    )
    csv_path = out_dir / "contour.csv"
    write_contour(rows, csv_path)
    summary = {
        "cells": len(rows),
        "d": landscape.diffusion,
        "ratio_min": min(r.ratio for r in rows),
        "ratio_max": max(r.ratio for r in rows),
    }
    write_json(out_dir / "contour.json", summary)
    return summary, [csv_path.name, "contour.json"]


_HANDLERS = {
    "eig": _cmd_eig,
    "lambda": _cmd_lambda,
    "steady": _cmd_steady,
    "evolve": _cmd_evolve,
    "threshold": _cmd_threshold,
    "sweep": _cmd_sweep,
    "contour": _cmd_contour,
}


def _run(argv) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "contour" and args.nodes is None:
        args.nodes = 1001
    scenario_text, landscape, grid, nodes = _resolve(args)
    out_dir = args.out
    out_dir.mkdir(parents=True, exist_ok=True)
    summary, outputs = _HANDLERS[args.command](args, landscape, grid, out_dir)
    write_manifest(
        out_dir,
        args.command,
        args.scenario,
        scenario_text,
        _parameters(args, nodes),
        outputs,
        __version__,
    )
    _emit(args, out_dir, summary)
    return 0


def main(argv=None) -> int:
    try:
        return _run(argv)
    except (ScenarioError, GridError, DataError, FileNotFoundError) as exc:
        sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return 2
    except SolverError as exc:
        sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
