"""Shared plumbing for the plotting scripts: CSV schema checks and the
render dispatch.  Display-only: nothing here recomputes model quantities.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

CONTOUR_LEVELS = tuple(np.round(np.linspace(0.1, 0.9, 9), 10))
PNG_METADATA = {"Software": "figplots"}  # fixed metadata keeps output reproducible


class SchemaError(ValueError):
    """Input CSV does not match the documented schema."""


@dataclass(frozen=True)
class PlotJob:
    inputs: tuple[Path, ...]
    kind: str  # "contour" | "profiles" | "decay"
    output: Path
    log_c: bool = False
    window: tuple[float, float] | None = None


def _base_names(header: list[str]) -> list[str]:
    # column names carry units in brackets: "t [time]" -> "t"
    return [col.split(" [")[0].strip() for col in header]


def read_table(path: Path, required: tuple[str, ...]) -> dict[str, np.ndarray]:
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines:
        raise SchemaError(f"{path}: empty file")
    names = _base_names(lines[0].split(","))
    missing = [col for col in required if col not in names]
    if missing:
        raise SchemaError(f"{path}: missing columns {missing} (found {names})")
    rows = [line.split(",") for line in lines[1:] if line.strip()]
    if len(rows) < 2:
        raise SchemaError(f"{path}: empty or degenerate table ({len(rows)} data rows)")
    data = np.array([[float(v) for v in row] for row in rows])
    if data.shape[1] != len(names):
        raise SchemaError(f"{path}: ragged rows")
    return {name: data[:, k] for k, name in enumerate(names)}


def render(job: PlotJob) -> dict:
    if job.kind == "contour":
        return _render_contour(job)
    if job.kind == "profiles":
        return _render_profiles(job)
    if job.kind == "decay":
        return _render_decay(job)
    raise SchemaError(f"unknown panel kind {job.kind!r}")


def _render_contour(job: PlotJob) -> dict:
    (path,) = job.inputs
    table = read_table(path, ("delta_fraction", "c", "ratio"))
    deltas = np.unique(table["delta_fraction"])
    cs = np.unique(table["c"])
    if deltas.size < 2 or cs.size < 2:
        raise SchemaError(f"{path}: need at least a 2x2 grid to contour")
    grid = np.full((cs.size, deltas.size), np.nan)
    di = np.searchsorted(deltas, table["delta_fraction"])
    ci = np.searchsorted(cs, table["c"])
    grid[ci, di] = table["ratio"]
    if np.any(np.isnan(grid)):
        raise SchemaError(f"{path}: table is not a full (delta, c) grid")

    fig, ax = plt.subplots(figsize=(5.0, 4.0))
    cset = ax.contour(deltas, cs, grid, levels=list(CONTOUR_LEVELS), colors="black")
    ax.clabel(cset, fmt="%.1f", fontsize=7)
    ax.set_xlabel("proportion of habitat removed")
    ax.set_ylabel("degradation rate c")
    if job.log_c:
        positive = cs > 0
        if positive.sum() >= 2:
            ax.set_yscale("log")
            ax.set_ylim(cs[positive].min(), cs.max())
    ax.set_title("population remaining at steady state")
    fig.tight_layout()
    fig.savefig(job.output, dpi=150, metadata=dict(PNG_METADATA))
    plt.close(fig)
    return {"levels": [float(l) for l in cset.levels], "shape": grid.shape}


def _render_profiles(job: PlotJob) -> dict:
    if not job.inputs:
        raise SchemaError("profiles panel needs at least one input CSV")
    fig, ax = plt.subplots(figsize=(5.0, 4.0))
    labels = []
    for path in job.inputs:
        table = read_table(path, ("x", "u"))
        if "c" in table:
            c = table["c"][0]
            label = "destruction limit" if np.isinf(c) else f"c = {c:g}"
        else:
            label = path.stem
        ax.plot(table["x"], table["u"], label=label)
        labels.append(label)
    ax.set_xlabel("x")
    ax.set_ylabel("steady-state density")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(job.output, dpi=150, metadata=dict(PNG_METADATA))
    plt.close(fig)
    return {"labels": labels}


def _render_decay(job: PlotJob) -> dict:
    (path,) = job.inputs
    table = read_table(path, ("t", "sup_norm"))
    t, sup = table["t"], table["sup_norm"]
    window = job.window or (5.0, float(t[-1]))
    mask = (t >= window[0]) & (t <= window[1]) & (sup > 0)
    if mask.sum() < 3:
        raise SchemaError(f"{path}: fewer than 3 positive samples in the fit window")
    slope, intercept = np.polyfit(t[mask], np.log(sup[mask]), 1)
    rate = -float(slope)

    fig, ax = plt.subplots(figsize=(5.0, 4.0))
    positive = sup > 0
    ax.semilogy(t[positive], sup[positive], label="sup norm")
    ax.semilogy(
        t[mask], np.exp(intercept + slope * t[mask]), "--",
        label=f"fit: rate = {rate:.4g}",
    )
    ax.set_xlabel("t")
    ax.set_ylabel("sup norm")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(job.output, dpi=150, metadata=dict(PNG_METADATA))
    plt.close(fig)
    return {"rate": rate, "window": list(window)}
