"""Time integration of the degradation/destruction problems and steady
states with persistence/extinction classification.

One IMEX Euler step treats diffusion and the linear sink implicitly and
the logistic reaction explicitly:

    (W - dt*(A - c*W_sink)) u_{n+1} = W * (u_n + dt * theta * f(x, u_n))

The implicit sink keeps the step size set by reaction scales even at
extreme degradation rates, and first order Euler (rather than a
trapezoidal scheme) preserves the discrete comparison structure the
ordering tests rely on.  A single evolution is sequential; distinct
evolutions share no mutable state and may run concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from . import kernels
from .discretize import DiscreteDomain, assemble_destruction_laplacian, assemble_neumann_laplacian
from .errors import ClassificationError, ScenarioError, SolverError, StabilityError
from .fields import Field
from .landscape import DESTRUCTION, CValue, Destruction
from .spectral import mu_degradation, mu_destruction

EXTINCTION_TOL = 1e-6
MARCH_RATE_TOL = 1e-8
NEWTON_TOL = 1e-10
ORDER_TOL = 1e-8


@dataclass
class EvolutionProblem:
    """A Cauchy problem on one grid: degradation at rate `c`, or the
    destruction limit when `c` is the DESTRUCTION marker.  For destruction
    the initial field must vanish on the closed degraded region."""

    grid: DiscreteDomain
    d: float
    c: CValue
    u0: Field
    dt: float
    t_final: float
    norm_stride: int = 1
    snapshot_times: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if not self.dt > 0:
            raise ScenarioError("dt must be positive")
        if not self.t_final >= 0:
            raise ScenarioError("t_final must be nonnegative")
        if np.min(self.u0.values) < 0:
            raise ScenarioError("initial data must be nonnegative")
        if self.u0.grid is not self.grid:
            raise ScenarioError("initial data lives on a different grid")
        if self.regime == "destruction":
            dead = self.grid.mask_b | self.grid.mask_db
            if np.any(self.u0.values[dead] != 0.0):
                raise ScenarioError(
                    "destruction initial data must vanish on the degraded region"
                )

    @property
    def regime(self) -> str:
        return "destruction" if isinstance(self.c, Destruction) else "degradation"

    @property
    def n_steps(self) -> int:
        return int(round(self.t_final / self.dt))

    def sup_cap(self) -> float:
        return 10.0 * max(self.u0.sup_norm(), self.grid.landscape.max_growth())


@dataclass
class TimeSeries:
    """Sampled norms of one evolution plus optional snapshots."""

    times: np.ndarray
    sup_norm: np.ndarray
    l2_norm: np.ndarray
    mean_density: np.ndarray
    snapshots: tuple[tuple[float, Field], ...]
    clip_total: float
    clip_count: int
    final: Field

    def __post_init__(self) -> None:
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("sample times must be strictly increasing")
        if min(self.sup_norm.min(initial=0.0), self.l2_norm.min(initial=0.0)) < 0:
            raise ValueError("norms must be nonnegative")


@dataclass
class SteadyState:
    """Stationary solution with its classification and diagnostics."""

    u: Field
    classification: str  # "persistent" | "extinct"
    residual: float
    march_steps: int
    newton_iterations: int
    newton_fallback: bool
    mu: float


class _StepContext:
    """Prefactored implicit solve plus reaction data for one problem."""

    def __init__(self, grid: DiscreteDomain, d: float, c: CValue, dt: float):
        self.grid = grid
        self.dt = dt
        destruction = isinstance(c, Destruction)
        if destruction:
            op = assemble_destruction_laplacian(grid, d)
            sink = np.zeros(op.n_dofs)
            react_w = np.ones(op.n_dofs)
        else:
            op = assemble_neumann_laplacian(grid, d)
            sink = float(c) * (1.0 - grid.frac_out)
            react_w = grid.frac_out.copy()
        self.op = op
        self.dofs = op.dofs
        self.w = op.weights
        self.react_w = react_w
        self.m_vals = grid.m_values()[op.dofs]
        matrix = (sp.diags(self.w) - dt * op.matrix + dt * sp.diags(self.w * sink)).tocsr()
        self.matrix = matrix
        self._is_1d = grid.dim == 1
        if self._is_1d:
            self.sub = np.r_[0.0, matrix.diagonal(-1)]
            self.dia = matrix.diagonal()
            self.sup = np.r_[matrix.diagonal(1), 0.0]
            self._lu = None
        else:
            self._lu = splu(matrix.tocsc())

    def rhs(self, u: np.ndarray) -> np.ndarray:
        return self.w * (u + self.dt * self.react_w * u * (self.m_vals - u))

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        if self._is_1d:
            return kernels.solve_tridiagonal(self.sub, self.dia, self.sup, rhs)
        return self._lu.solve(rhs)


def _context(problem: EvolutionProblem) -> _StepContext:
    ctx = getattr(problem, "_ctx", None)
    if ctx is None:
        ctx = _StepContext(problem.grid, problem.d, problem.c, problem.dt)
        problem._ctx = ctx
    return ctx


def step(problem: EvolutionProblem, u_n: Field) -> Field:
    """One IMEX step. Negative values are clipped to zero; the clipped
    magnitude is reported on the returned field."""
    if np.min(u_n.values) < 0:
        raise ScenarioError("step requires nonnegative input")
    ctx = _context(problem)
    u = u_n.values[ctx.dofs]
    try:
        nxt = ctx.solve(ctx.rhs(u))
    except RuntimeError as exc:  # pragma: no cover - factorization failure
        raise SolverError(f"implicit solve failed: {exc}") from exc
    clip = float(-nxt[nxt < 0].sum())
    nxt = np.maximum(nxt, 0.0)
    if problem.regime == "destruction":
        out = Field.from_restricted(problem.grid, nxt)
    else:
        out = Field(problem.grid, nxt)
    out.clip_magnitude = clip
    if out.sup_norm() > problem.sup_cap():
        raise StabilityError(
            f"sup-norm {out.sup_norm():.3g} exceeded the stability cap; reduce dt"
        )
    return out


def _sample_steps(n_steps: int, stride: int) -> np.ndarray:
    steps = np.arange(0, n_steps + 1, max(stride, 1), dtype=np.int64)
    if steps[-1] != n_steps:
        steps = np.r_[steps, n_steps]
    return steps


def evolve(problem: EvolutionProblem) -> TimeSeries:
    """Integrate to t_final, sampling norms every `norm_stride` steps and
    full snapshots at the requested times.  Deterministic for fixed
    (grid, dt, u0)."""
    ctx = _context(problem)
    n_steps = problem.n_steps
    norm_steps = _sample_steps(n_steps, problem.norm_stride)
    snap_steps = np.unique(
        np.array(
            [int(round(t / problem.dt)) for t in problem.snapshot_times], dtype=np.int64
        )
    )
    if np.any(snap_steps < 0) or np.any(snap_steps > n_steps):
        raise ScenarioError("snapshot times outside the integration horizon")
    u0 = problem.u0.values[ctx.dofs]
    cap = problem.sup_cap()
    if problem.grid.dim == 1:
        times, sups, l2s, means, snaps, final, clip_total, clip_count, status = (
            kernels.evolve_1d(
                u0,
                n_steps,
                problem.dt,
                ctx.sub,
                ctx.dia,
                ctx.sup,
                ctx.react_w,
                ctx.m_vals,
                ctx.w,
                problem.grid.measure_omega(),
                norm_steps,
                snap_steps,
                cap,
            )
        )
    else:
        times, sups, l2s, means, snaps, final, clip_total, clip_count, status = (
            _evolve_generic(problem, ctx, norm_steps, snap_steps, cap)
        )
    if status == kernels.STATUS_UNSTABLE:
        raise StabilityError(
            f"sup-norm {sups[-1]:.3g} exceeded the stability cap at t = "
            f"{times[-1]:g}; reduce dt"
        )

    def wrap(values: np.ndarray) -> Field:
        if problem.regime == "destruction":
            return Field.from_restricted(problem.grid, values)
        return Field(problem.grid, values)

    snapshots = tuple(
        (float(s * problem.dt), wrap(snaps[i])) for i, s in enumerate(snap_steps)
    )
    return TimeSeries(
        times=times,
        sup_norm=sups,
        l2_norm=l2s,
        mean_density=means,
        snapshots=snapshots,
        clip_total=float(clip_total),
        clip_count=int(clip_count),
        final=wrap(final),
    )


def _evolve_generic(problem, ctx, norm_steps, snap_steps, cap):
    """Python/scipy loop for grids the fused kernels do not cover."""
    u = problem.u0.values[ctx.dofs].copy()
    w = ctx.w
    measure = problem.grid.measure_omega()
    times, sups, l2s, means, snaps = [], [], [], [], []
    norm_set = {int(s) for s in norm_steps}
    snap_set = {int(s) for s in snap_steps}
    clip_total = 0.0
    clip_count = 0
    status = kernels.STATUS_OK
    for k in range(problem.n_steps + 1):
        if k in snap_set:
            snaps.append(u.copy())
        if k in norm_set:
            times.append(k * problem.dt)
            sups.append(float(u.max()))
            l2s.append(float(np.sqrt(w @ u**2)))
            means.append(float(w @ u / measure))
            if sups[-1] > cap:
                status = kernels.STATUS_UNSTABLE
                break
        if k == problem.n_steps:
            break
        u = ctx.solve(ctx.rhs(u))
        neg = u < 0
        if np.any(neg):
            clip_total += float(-u[neg].sum())
            clip_count += int(neg.sum())
            u[neg] = 0.0
    return (
        np.asarray(times),
        np.asarray(sups),
        np.asarray(l2s),
        np.asarray(means),
        np.asarray(snaps) if snaps else np.empty((0, u.size)),
        u,
        clip_total,
        clip_count,
        status,
    )


def default_initial(grid: DiscreteDomain, level: float = 0.5, margin: float = 1.0) -> Field:
    """Initial data for threshold studies: `level` where the distance to the
    closed degraded region exceeds `margin`, zero elsewhere. Valid for both
    regimes on the same grid."""
    pts = grid.coords()
    values = np.full(grid.n_nodes, level)
    for box in grid.snapped_b:
        gaps = np.zeros_like(pts)
        for k in range(grid.dim):
            gaps[:, k] = np.maximum(
                np.maximum(box.lo[k] - pts[:, k], pts[:, k] - box.hi[k]), 0.0
            )
        dist = np.sqrt(np.sum(gaps**2, axis=1))
        values[dist <= margin] = 0.0
    return Field(grid, values)


def _march(ctx: _StepContext, u_start: np.ndarray, dt: float, rate_tol: float, max_steps: int):
    if ctx.grid.dim == 1:
        return kernels.march_1d(
            u_start, max_steps, dt, ctx.sub, ctx.dia, ctx.sup,
            ctx.react_w, ctx.m_vals, ctx.w, rate_tol,
        )
    u = u_start.copy()
    rate = np.inf
    steps = 0
    for k in range(max_steps):
        nxt = np.maximum(ctx.solve(ctx.rhs(u)), 0.0)
        rate = float(np.max(np.abs(nxt - u)) / dt)
        u = nxt
        steps = k + 1
        if rate < rate_tol:
            break
    return u, steps, rate


def _stationary_residual(ctx: _StepContext, c: CValue, u: np.ndarray) -> np.ndarray:
    """Pointwise residual of d*Lap(u) + theta*f(x,u) - sink*u on the dofs."""
    sink = (
        np.zeros_like(u)
        if isinstance(c, Destruction)
        else float(c) * (1.0 - ctx.grid.frac_out[ctx.dofs])
    )
    g = ctx.react_w * u * (ctx.m_vals - u) - sink * u
    return (ctx.op.matrix @ u) / ctx.w + g


def steady_state(
    grid: DiscreteDomain,
    d: float,
    c: CValue,
    dt: float = 0.01,
    march_rate_tol: float = MARCH_RATE_TOL,
    t_max: float = 6000.0,
    newton_tol: float = NEWTON_TOL,
    newton_max: int = 40,
    extinction_tol: float = EXTINCTION_TOL,
) -> SteadyState:
    """March from the half-carrying-capacity constant until the update rate
    drops below tolerance, refine by Newton, then classify by sup-norm and
    cross-check against the sign of the principal eigenvalue (persistent
    iff it is negative).  Disagreement raises ClassificationError."""
    ctx = _StepContext(grid, d, c, dt)
    u_start = np.full(ctx.dofs.size, grid.landscape.max_growth() / 2.0)
    u, march_steps, _ = _march(ctx, u_start, dt, march_rate_tol, int(round(t_max / dt)))

    sink = (
        np.zeros(ctx.dofs.size)
        if isinstance(c, Destruction)
        else float(c) * (1.0 - grid.frac_out[ctx.dofs])
    )
    marched = u.copy()
    newton_its = 0
    fallback = False
    res_inf = float(np.max(np.abs(_stationary_residual(ctx, c, u))))
    prev_res = res_inf
    increases = 0
    while res_inf > newton_tol and newton_its < newton_max:
        gprime = ctx.react_w * (ctx.m_vals - 2.0 * u) - sink
        jac = (ctx.op.matrix + sp.diags(ctx.w * gprime)).tocsc()
        g = ctx.react_w * u * (ctx.m_vals - u) - sink * u
        residual_w = ctx.op.matrix @ u + ctx.w * g
        try:
            delta = splu(jac).solve(-residual_w)
        except RuntimeError:
            fallback = True
            break
        u = u + delta
        newton_its += 1
        res_inf = float(np.max(np.abs(_stationary_residual(ctx, c, u))))
        if not np.isfinite(res_inf) or res_inf > prev_res:
            increases += 1
            if increases >= 2:
                fallback = True
                break
        else:
            increases = 0
        prev_res = res_inf
    if res_inf > newton_tol and newton_its >= newton_max:
        fallback = True
    if fallback:
        u = marched
        res_inf = float(np.max(np.abs(_stationary_residual(ctx, c, u))))

    if isinstance(c, Destruction):
        u_field = Field.from_restricted(grid, np.maximum(u, 0.0))
        mu = mu_destruction(grid, d).value
    else:
        u_field = Field(grid, np.maximum(u, 0.0))
        mu = mu_degradation(grid, d, float(c)).value
    sup = u_field.sup_norm()
    classification = "extinct" if sup <= extinction_tol else "persistent"
    eigen_says = "persistent" if mu < 0 else "extinct"
    if classification != eigen_says:
        raise ClassificationError(
            f"norm test says {classification} (sup = {sup:.3e}) but the "
            f"principal eigenvalue {mu:.3e} says {eigen_says}"
        )
    if classification == "persistent" and not u_field.min_over_out() > 0:
        raise ClassificationError("persistent steady state is not positive outside the degraded region")
    return SteadyState(
        u=u_field,
        classification=classification,
        residual=res_inf,
        march_steps=march_steps,
        newton_iterations=newton_its,
        newton_fallback=fallback,
        mu=mu,
    )


@dataclass
class RegimeComparison:
    """Side-by-side degradation runs against the destruction limit."""

    c_list: tuple[float, ...]
    sup_gaps: tuple[float, ...]  # per c: max over samples of |u_c - u_inf|
    ordering_violations: int  # nodes/times with u_{c2} > u_{c1} + tol, c2 > c1
    destruction_violations: int  # nodes/times with u_inf > u_c + tol
    tolerance: float = ORDER_TOL


def compare_regimes(
    grid: DiscreteDomain,
    d: float,
    c_list: tuple[float, ...],
    u0: Field,
    t_final: float = 50.0,
    dt: float = 0.01,
    snapshot_stride: int = 50,
) -> RegimeComparison:
    """Run each degradation rate and the destruction limit with shared
    initial data on one grid; report sup gaps and ordering violations at
    the sampled times."""
    if u0.grid is not grid:
        raise ScenarioError("initial data lives on a different grid")
    cs = tuple(sorted(float(c) for c in c_list))
    n_steps = int(round(t_final / dt))
    snap_times = tuple(
        float(s * dt) for s in _sample_steps(n_steps, snapshot_stride)
    )

    def run(c: CValue) -> np.ndarray:
        problem = EvolutionProblem(
            grid=grid, d=d, c=c, u0=u0, dt=dt, t_final=t_final,
            norm_stride=max(n_steps, 1), snapshot_times=snap_times,
        )
        series = evolve(problem)
        return np.stack([snap.values for _, snap in series.snapshots])

    dest = run(DESTRUCTION)
    runs = {c: run(c) for c in cs}
    sup_gaps = tuple(float(np.max(np.abs(runs[c] - dest))) for c in cs)
    tol = ORDER_TOL
    ordering = 0
    for i in range(len(cs)):
        for j in range(i + 1, len(cs)):
            ordering += int(np.count_nonzero(runs[cs[j]] > runs[cs[i]] + tol))
    destruction = sum(
        int(np.count_nonzero(dest > runs[c] + tol)) for c in cs
    )
    return RegimeComparison(
        c_list=cs,
        sup_gaps=sup_gaps,
        ordering_violations=ordering,
        destruction_violations=destruction,
        tolerance=tol,
    )
