"""Uniform Cartesian grids, region masks and sparse operators.

The discrete Laplacian is kept in weighted (lumped-mass) form: the stored
matrix A satisfies A = W * L where L is the mirror-ghost finite-difference
Laplacian and W the diagonal of trapezoid quadrature weights.  This makes A
symmetric with zero row sums while the pointwise operator application stays
the plain second-order stencil, W^{-1} A v.  Eigenproblems downstream are
generalized pencils against W.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp
from scipy.io import mmwrite

from .errors import GridError
from .landscape import Box, Landscape


def _axis_stiffness(n: int, h: float) -> sp.csr_matrix:
    """1D stiffness (1/h) * path Laplacian; v @ S @ v is the trapezoid-exact
    Dirichlet energy of a piecewise-linear interpolant."""
    main = np.full(n, 2.0)
    main[0] = main[-1] = 1.0
    off = -np.ones(n - 1)
    return sp.diags([off, main, off], [-1, 0, 1], format="csr") * (1.0 / h)


def _axis_weights(n: int, h: float) -> np.ndarray:
    w = np.full(n, h)
    w[0] = w[-1] = h / 2
    return w


@dataclass
class DiscreteDomain:
    """Grid, masks and quadrature for one landscape at one resolution.

    Masks partition the nodes: `mask_b` (strictly inside the snapped
    degraded region), `mask_db` (on its interface) and `mask_out`
    (everything else, outer boundary included).  `frac_out[i]` is the
    fraction of node i's dual quadrature cell outside the closed degraded
    region: 1 outside, 0 inside, 1/2 on interface faces and 3/4 on 2D
    interface corners.  It splits growth and sink consistently with the
    trapezoid rule.

    Treat instances as immutable after construction.
    """

    landscape: Landscape
    shape: tuple[int, ...]
    h: tuple[float, ...]
    axes: tuple[np.ndarray, ...]
    mask_b: np.ndarray
    mask_db: np.ndarray
    mask_out: np.ndarray
    frac_out: np.ndarray
    weights: np.ndarray
    snapped_b: tuple[Box, ...]
    snap_distance: float
    _unit_stiffness: sp.csr_matrix | None = field(default=None, repr=False, compare=False)

    @property
    def dim(self) -> int:
        return len(self.shape)

    @property
    def n_nodes(self) -> int:
        return int(np.prod(self.shape))

    @property
    def out_dofs(self) -> np.ndarray:
        return np.flatnonzero(self.mask_out)

    def coords(self) -> np.ndarray:
        """Node coordinates, shape (n_nodes, dim), C order (x-major)."""
        grids = np.meshgrid(*self.axes, indexing="ij")
        return np.column_stack([g.ravel() for g in grids])

    def m_values(self) -> np.ndarray:
        return self.landscape.growth.values(self.coords())

    def measure_omega(self) -> float:
        return self.landscape.measure_omega

    def measure_b_discrete(self) -> float:
        """Quadrature of the degraded-region indicator (interface at half
        weight); converges to the continuum |B| under refinement."""
        return float(np.sum(self.weights * (1.0 - self.frac_out)))

    @property
    def unit_stiffness(self) -> sp.csr_matrix:
        """Positive-semidefinite weighted stiffness with unit diffusion;
        v @ S @ v approximates the squared H1 seminorm."""
        if self._unit_stiffness is None:
            self._unit_stiffness = _weighted_stiffness(self, 1.0)
        return self._unit_stiffness


def _snap_index(value: float, lo: float, h: float) -> int:
    return int(round((value - lo) / h))


def build_grid(landscape: Landscape, nodes_per_axis: int) -> DiscreteDomain:
    """Build the grid with the degraded-region faces snapped to nodes.

    Interface nodes carry the Dirichlet condition of the destruction
    problem exactly; the snap distance is recorded on the result.
    """
    if nodes_per_axis < 16:
        raise GridError(f"nodes_per_axis must be >= 16, got {nodes_per_axis}")
    dim = landscape.dim
    n = nodes_per_axis
    axes = tuple(
        np.linspace(landscape.omega.lo[k], landscape.omega.hi[k], n) for k in range(dim)
    )
    hs = tuple(
        (landscape.omega.hi[k] - landscape.omega.lo[k]) / (n - 1) for k in range(dim)
    )
    shape = (n,) * dim

    snapped_ranges: list[tuple[tuple[int, int], ...]] = []
    snapped_boxes: list[Box] = []
    snap_distance = 0.0
    for box in landscape.b_region:
        ranges = []
        for k in range(dim):
            ilo = _snap_index(box.lo[k], landscape.omega.lo[k], hs[k])
            ihi = _snap_index(box.hi[k], landscape.omega.lo[k], hs[k])
            snap_distance = max(
                snap_distance,
                abs(axes[k][min(max(ilo, 0), n - 1)] - box.lo[k]),
                abs(axes[k][min(max(ihi, 0), n - 1)] - box.hi[k]),
            )
            if ihi - ilo < 2:
                raise GridError(
                    "degraded component too thin to contain a node at this "
                    f"resolution (axis {k}: snapped width {ihi - ilo} cells)"
                )
            if ilo < 1 or ihi > n - 2:
                raise GridError(
                    "degraded component touches the outer boundary after snapping"
                )
            ranges.append((ilo, ihi))
        snapped_ranges.append(tuple(ranges))
        snapped_boxes.append(
            Box(
                tuple(axes[k][ranges[k][0]] for k in range(dim)),
                tuple(axes[k][ranges[k][1]] for k in range(dim)),
            )
        )
    for a in range(len(snapped_ranges)):
        for b in range(a + 1, len(snapped_ranges)):
            separated = any(
                snapped_ranges[a][k][1] + 2 <= snapped_ranges[b][k][0]
                or snapped_ranges[b][k][1] + 2 <= snapped_ranges[a][k][0]
                for k in range(dim)
            )
            if not separated:
                raise GridError(
                    "degraded components merge or touch at this resolution"
                )

    n_nodes = n**dim
    mask_b = np.zeros(n_nodes, dtype=bool)
    mask_db = np.zeros(n_nodes, dtype=bool)
    inside_frac = np.zeros(n_nodes)
    for ranges in snapped_ranges:
        # per-axis dual-cell fraction inside the closed snapped box:
        # 1 strictly between the faces, 1/2 on a face, 0 outside
        strict = np.ones(n_nodes, dtype=bool)
        closed = np.ones(n_nodes, dtype=bool)
        frac = np.ones(n_nodes)
        for k in range(dim):
            idx = np.arange(n)
            ax_strict = (idx > ranges[k][0]) & (idx < ranges[k][1])
            ax_closed = (idx >= ranges[k][0]) & (idx <= ranges[k][1])
            ax_frac = np.where(ax_strict, 1.0, np.where(ax_closed, 0.5, 0.0))
            reshape = [1] * dim
            reshape[k] = n
            tile = [n] * dim
            tile[k] = 1
            strict &= np.tile(ax_strict.reshape(reshape), tile).ravel()
            closed &= np.tile(ax_closed.reshape(reshape), tile).ravel()
            frac = frac * np.tile(ax_frac.reshape(reshape), tile).ravel()
        mask_b |= strict
        mask_db |= closed & ~strict
        inside_frac += frac
    mask_out = ~(mask_b | mask_db)
    frac_out = 1.0 - inside_frac

    axis_w = [_axis_weights(n, hs[k]) for k in range(dim)]
    weights = axis_w[0]
    for k in range(1, dim):
        weights = np.kron(weights, axis_w[k])

    return DiscreteDomain(
        landscape=landscape,
        shape=shape,
        h=hs,
        axes=axes,
        mask_b=mask_b,
        mask_db=mask_db,
        mask_out=mask_out,
        frac_out=frac_out,
        weights=weights,
        snapped_b=tuple(snapped_boxes),
        snap_distance=snap_distance,
    )


@dataclass
class SparseOperator:
    """Weighted form of d * Laplacian on the retained degrees of freedom.

    `matrix` is symmetric; -matrix is positive semidefinite (Neumann kind)
    or positive definite (destruction kind with a nonempty degraded
    region).  Pointwise application is W^{-1} A v.  `dofs` maps operator
    rows to full-grid node indices.  Assembled operators are immutable;
    `apply` is safe to call concurrently.
    """

    matrix: sp.csr_matrix
    weights: np.ndarray
    kind: str  # "neumann-full" | "destruction-restricted"
    dofs: np.ndarray
    grid: DiscreteDomain
    diffusion: float

    @property
    def n_dofs(self) -> int:
        return self.matrix.shape[0]

    def apply(self, values: np.ndarray) -> np.ndarray:
        """Second-order pointwise approximation of d * Laplacian(values)."""
        return (self.matrix @ values) / self.weights

    def dirichlet_energy(self, values: np.ndarray) -> float:
        """v @ (-A) @ v, the weighted d-gradient energy of v."""
        return float(values @ (-(self.matrix @ values)))

    def to_matrix_market(self, path: str | Path) -> None:
        """Dump the weighted matrix as matrix-market text."""
        mmwrite(str(path), sp.coo_matrix(self.matrix), symmetry="symmetric")


def _weighted_stiffness(grid: DiscreteDomain, d: float) -> sp.csr_matrix:
    """Positive-semidefinite d * stiffness in weighted form (= -A)."""
    if grid.dim == 1:
        s = _axis_stiffness(grid.shape[0], grid.h[0]) * d
        return s.tocsr()
    sx = _axis_stiffness(grid.shape[0], grid.h[0])
    sy = _axis_stiffness(grid.shape[1], grid.h[1])
    wx = sp.diags(_axis_weights(grid.shape[0], grid.h[0]))
    wy = sp.diags(_axis_weights(grid.shape[1], grid.h[1]))
    return (d * (sp.kron(sx, wy) + sp.kron(wx, sy))).tocsr()


def assemble_neumann_laplacian(grid: DiscreteDomain, d: float) -> SparseOperator:
    """d * Laplacian on the full grid with mirror-ghost closure on the outer
    boundary, symmetrized by the quadrature weights."""
    matrix = (-_weighted_stiffness(grid, d)).tocsr()
    return SparseOperator(
        matrix=matrix,
        weights=grid.weights.copy(),
        kind="neumann-full",
        dofs=np.arange(grid.n_nodes),
        grid=grid,
        diffusion=d,
    )


def assemble_destruction_laplacian(grid: DiscreteDomain, d: float) -> SparseOperator:
    """Restriction of the Neumann operator to nodes outside the closed
    degraded region; interface values are eliminated as homogeneous
    Dirichlet data, the outer boundary keeps its zero-flux closure."""
    full = -_weighted_stiffness(grid, d)
    keep = grid.out_dofs
    matrix = full[keep][:, keep].tocsr()
    return SparseOperator(
        matrix=matrix,
        weights=grid.weights[keep],
        kind="destruction-restricted",
        dofs=keep,
        grid=grid,
        diffusion=d,
    )
