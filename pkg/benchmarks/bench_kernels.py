#!/usr/bin/env python3
"""Benchmark the fused numba evolution kernels against the numpy/scipy
fallback on a representative 1D run.

Usage: python benchmarks/bench_kernels.py [--nodes N] [--steps K] [--repeat R]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from hablab import build_grid
from hablab.kernels import (
    HAS_NUMBA,
    _evolve_1d_np,
    _march_1d_np,
    evolve_1d,
    march_1d,
)
from hablab.landscape import Box, GrowthProfile, Landscape


def build_args(nodes: int, steps: int):
    landscape = Landscape(
        dim=1,
        omega=Box((-10.0,), (10.0,)),
        b_region=(Box((-6.0,), (6.0,)),),
        diffusion=10.0,
        growth=GrowthProfile(default=1.0),
    ).validate()
    grid = build_grid(landscape, nodes)
    from hablab.dynamics import _StepContext, default_initial

    ctx = _StepContext(grid, 10.0, 20.0, 0.01)
    u0 = default_initial(grid).values
    norm_steps = np.arange(0, steps + 1, 10, dtype=np.int64)
    snap_steps = np.empty(0, dtype=np.int64)
    return (
        u0, steps, 0.01, ctx.sub, ctx.dia, ctx.sup,
        ctx.react_w, ctx.m_vals, ctx.w, 20.0,
        norm_steps, snap_steps, 1e9,
    )


def timed(fn, args, repeat: int) -> float:
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--nodes", type=int, default=2001)
    parser.add_argument("--steps", type=int, default=20000)
    parser.add_argument("--repeat", type=int, default=3)
    opts = parser.parse_args()

    args = build_args(opts.nodes, opts.steps)
    march_args = args[:1] + (opts.steps,) + args[2:9] + (1e-14,)

    print(f"evolve: {opts.steps} steps x {opts.nodes} nodes (best of {opts.repeat})")
    if HAS_NUMBA:
        evolve_1d(*args)  # warm the JIT cache before timing
        march_1d(*march_args)
        t_nb = timed(evolve_1d, args, opts.repeat)
        print(f"  numba kernel : {t_nb:8.3f} s")
    else:
        t_nb = None
        print("  numba kernel : unavailable (HABLAB_NO_NUMBA set or numba missing)")
    t_np = timed(_evolve_1d_np, args, opts.repeat)
    print(f"  numpy/scipy  : {t_np:8.3f} s")
    if t_nb:
        print(f"  speedup      : {t_np / t_nb:8.2f} x")

    print("march to steady state (same size)")
    if HAS_NUMBA:
        t_nb = timed(march_1d, march_args, opts.repeat)
        print(f"  numba kernel : {t_nb:8.3f} s")
    t_np = timed(_march_1d_np, march_args, opts.repeat)
    print(f"  numpy/scipy  : {t_np:8.3f} s")
    if HAS_NUMBA and t_nb:
        print(f"  speedup      : {t_np / t_nb:8.2f} x")


if __name__ == "__main__":
    main()
