"""Extinction-threshold location, convergence sweeps in the degradation
rate, decay-rate fitting and contour tables over (habitat fraction, c).

The threshold is located on the eigenvalue side: the degradation principal
eigenvalue is cheap, monotone in c, and its sign determines persistence,
so bisection on its zero crossing replaces long dynamic runs.  Per-cell
work in sweeps and contour tables is independent and runs in a thread
pool capped by HABLAB_THREADS; results are reduced in submission order,
so output is deterministic.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .discretize import DiscreteDomain, build_grid
from .dynamics import (
    EvolutionProblem,
    TimeSeries,
    default_initial,
    evolve,
    steady_state,
)
from .errors import BracketError, DataError, ScenarioError
from .fields import h1_distance, sup_distance
from .landscape import DESTRUCTION, Box, GrowthProfile, Landscape, c_star
from .spectral import (
    lambda_degradation,
    lambda_destruction,
    mu_degradation,
    mu_destruction,
)

BRACKET_CAP = 1e12
DECAY_WINDOW_START = 5.0
MIN_FIT_SAMPLES = 10


def _worker_count() -> int:
    raw = os.environ.get("HABLAB_THREADS", "").strip()
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return min(4, os.cpu_count() or 1)


def _parallel_map(fn, items):
    items = list(items)
    workers = _worker_count()
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


@dataclass
class ThresholdReport:
    """Existence and location of the extinction threshold in c.

    The threshold exists iff the destruction principal eigenvalue is
    positive; when it does, c0 exceeds the mean-growth lower bound
    c_star."""

    exists: bool
    mu_infinity: float
    c_star_lower_bound: float
    c0: float | None = None
    bracket: tuple[float, float] | None = None
    bracket_mu: tuple[float, float] | None = None
    bisection_iterations: int = 0
    trace: tuple[tuple[float, float, float, float], ...] = ()
    decay_rate_probe: float | None = None
    probe_c: float | None = None


def find_extinction_threshold(
    grid: DiscreteDomain,
    d: float,
    rel_bracket_tol: float = 1e-4,
    mu_tol: float = 1e-8,
    c_cap: float = BRACKET_CAP,
    probe_decay: bool = False,
    dt: float = 0.01,
) -> ThresholdReport:
    """Bisect the zero crossing of c -> mu_1(c), starting from the bracket
    [c_star, c_hi] with c_hi doubled until the eigenvalue turns positive."""
    if not grid.landscape.b_region:
        raise ScenarioError("threshold search needs a nonempty degraded region")
    mu_inf = mu_destruction(grid, d).value
    cs = c_star(grid.landscape)
    if mu_inf <= 0:
        return ThresholdReport(exists=False, mu_infinity=mu_inf, c_star_lower_bound=cs)

    mu_of = lambda c: mu_degradation(grid, d, c).value
    lo = cs
    mu_lo = mu_of(lo)
    if mu_lo >= 0:
        raise BracketError(
            f"eigenvalue at the c_star lower bound is not negative ({mu_lo:.3e})"
        )
    hi = max(2.0 * cs, 1.0)
    mu_hi = mu_of(hi)
    while mu_hi <= 0:
        lo, mu_lo = hi, mu_hi
        hi *= 2.0
        if hi > c_cap:
            raise BracketError(
                "bracket expansion exceeded the cap; the destruction eigenvalue "
                "is numerically indistinguishable from zero"
            )
        mu_hi = mu_of(hi)

    trace: list[tuple[float, float, float, float]] = []
    iterations = 0
    while hi - lo >= rel_bracket_tol * 0.5 * (hi + lo):
        mid = 0.5 * (lo + hi)
        mu_mid = mu_of(mid)
        trace.append((lo, hi, mid, mu_mid))
        iterations += 1
        if abs(mu_mid) < mu_tol:
            lo = hi = mid
            break
        if mu_mid < 0:
            lo, mu_lo = mid, mu_mid
        else:
            hi, mu_hi = mid, mu_mid
    c0 = 0.5 * (lo + hi)
    if not c0 > cs:
        raise BracketError(f"threshold {c0:g} does not exceed the lower bound {cs:g}")

    report = ThresholdReport(
        exists=True,
        mu_infinity=mu_inf,
        c_star_lower_bound=cs,
        c0=c0,
        bracket=(lo, hi) if lo < hi else (lo - 0.5 * rel_bracket_tol * c0, hi + 0.5 * rel_bracket_tol * c0),
        bracket_mu=(mu_lo, mu_hi),
        bisection_iterations=iterations,
        trace=tuple(trace),
    )
    if probe_decay:
        probe_c = 2.0 * c0
        series = evolve(
            EvolutionProblem(
                grid=grid,
                d=d,
                c=probe_c,
                u0=default_initial(grid),
                dt=dt,
                t_final=80.0,
            )
        )
        report.decay_rate_probe = fit_decay_rate(series, (10.0, 80.0))
        report.probe_c = probe_c
    return report


def fit_decay_rate(series: TimeSeries, window: tuple[float, float]) -> float:
    """Least-squares slope of log sup-norm over the window; returns the
    positive decay rate r with sup-norm ~ exp(-r t)."""
    t0, t1 = window
    mask = (series.times >= t0) & (series.times <= t1)
    if int(mask.sum()) < MIN_FIT_SAMPLES:
        raise DataError(
            f"window [{t0:g}, {t1:g}] holds {int(mask.sum())} samples; "
            f"need at least {MIN_FIT_SAMPLES}"
        )
    sups = series.sup_norm[mask]
    times = series.times[mask]
    if np.any(sups <= 0):
        raise DataError("sup-norm must be positive on the fit window")
    if np.any(np.diff(sups) >= 0):
        raise DataError("sup-norm is not decreasing on the fit window")
    slope = np.polyfit(times, np.log(sups), 1)[0]
    rate = -float(slope)
    if rate <= 0:
        raise DataError("fitted rate is not positive")
    return rate


@dataclass
class SweepRow:
    c: float
    mu: float
    lam: float | None
    steady_gap_sup: float
    eig_gap_h1: float
    mean_density: float


@dataclass
class SweepReport:
    """Per-c eigenvalues, weight eigenvalues and gaps to the destruction
    limit, plus the limit row itself."""

    rows: tuple[SweepRow, ...]
    mu_infinity: float
    lambda_infinity: float | None
    u_infinity_sup: float
    u_infinity_mean: float
    empirical_mu_order: float | None


def sweep_c(
    grid: DiscreteDomain, d: float, c_list: tuple[float, ...], dt: float = 0.01
) -> SweepReport:
    """Fill the convergence table along an increasing list of degradation
    rates.  The empirical order of the mu gap in c is reported, not
    asserted."""
    cs = tuple(float(c) for c in c_list)
    if any(nxt <= prev for prev, nxt in zip(cs, cs[1:])):
        raise ScenarioError("c_list must be strictly increasing")
    mu_inf_res = mu_destruction(grid, d)
    star = c_star(grid.landscape) if grid.landscape.b_region else np.inf
    lam_inf = (
        lambda_destruction(grid).value if grid.landscape.b_region else None
    )
    u_inf = steady_state(grid, d, DESTRUCTION, dt=dt)

    def one(c: float) -> SweepRow:
        mu_res = mu_degradation(grid, d, c)
        lam = lambda_degradation(grid, c).value if c > star else None
        ss = steady_state(grid, d, c, dt=dt)
        return SweepRow(
            c=c,
            mu=mu_res.value,
            lam=lam,
            steady_gap_sup=sup_distance(ss.u, u_inf.u),
            eig_gap_h1=h1_distance(mu_res.eigenfunction, mu_inf_res.eigenfunction),
            mean_density=ss.u.mean_density(),
        )

    rows = tuple(_parallel_map(one, cs))
    gaps = np.array([abs(row.mu - mu_inf_res.value) for row in rows])
    order = None
    positive = gaps > 0
    if int(positive.sum()) >= 2:
        order = float(
            -np.polyfit(np.log(np.asarray(cs)[positive]), np.log(gaps[positive]), 1)[0]
        )
    return SweepReport(
        rows=rows,
        mu_infinity=mu_inf_res.value,
        lambda_infinity=lam_inf,
        u_infinity_sup=u_inf.u.sup_norm(),
        u_infinity_mean=u_inf.u.mean_density(),
        empirical_mu_order=order,
    )


@dataclass
class ContourRow:
    delta_fraction: float
    c: float
    ratio: float


def contour_table(
    d: float,
    delta_list: tuple[float, ...],
    c_list: tuple[float, ...],
    nodes: int = 1001,
    omega: tuple[float, float] = (-10.0, 10.0),
    growth: float = 1.0,
    dt: float = 0.01,
) -> tuple[ContourRow, ...]:
    """Mean steady-state density relative to the undisturbed baseline on a
    (delta, c) grid for the centered-interval family B = (-delta, delta).
    The baseline is the c = 0 state, which is identically `growth`, so the
    ratio denominator is exact."""
    lo, hi = omega
    half_width = (hi - lo) / 2.0
    center = (hi + lo) / 2.0
    grids: dict[float, DiscreteDomain] = {}
    for delta in delta_list:
        if not 0 <= delta < half_width:
            raise ScenarioError(f"delta must lie in [0, {half_width:g}), got {delta}")
        b_region = (
            ()
            if delta == 0
            else (Box((center - delta,), (center + delta,)),)
        )
        landscape = Landscape(
            dim=1,
            omega=Box((lo,), (hi,)),
            b_region=b_region,
            diffusion=d,
            growth=GrowthProfile(default=growth),
            c_values=(0.0,),
        ).validate()
        grids[delta] = build_grid(landscape, nodes)

    cells = [(delta, float(c)) for delta in delta_list for c in c_list]

    def one(cell: tuple[float, float]) -> ContourRow:
        delta, c = cell
        ss = steady_state(grids[delta], d, c, dt=dt)
        return ContourRow(
            delta_fraction=delta / half_width,
            c=c,
            ratio=ss.u.mean_density() / growth,
        )

    return tuple(_parallel_map(one, cells))
