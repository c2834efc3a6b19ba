"""Grid functions (densities, eigenfunctions) with quadrature norms."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .discretize import DiscreteDomain


@dataclass
class Field:
    """Values at grid nodes. Destruction-restricted fields are stored
    zero-extended: exactly 0 on the degraded region and its interface."""

    grid: DiscreteDomain
    values: np.ndarray
    domain: str = "full"  # "full" | "restricted"
    clip_magnitude: float = field(default=0.0, compare=False)

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.n_nodes,):
            raise ValueError(
                f"field has {self.values.shape} values for {self.grid.n_nodes} nodes"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field contains non-finite values")
        if self.domain == "restricted":
            dead = self.grid.mask_b | self.grid.mask_db
            if np.any(self.values[dead] != 0.0):
                raise ValueError("restricted field must vanish on the degraded region")
        elif self.domain != "full":
            raise ValueError(f"unknown field domain {self.domain!r}")

    @classmethod
    def from_restricted(
        cls, grid: DiscreteDomain, values_at_out: np.ndarray
    ) -> "Field":
        """Zero-extend values given on the out-region degrees of freedom."""
        full = np.zeros(grid.n_nodes)
        full[grid.out_dofs] = values_at_out
        return cls(grid, full, domain="restricted")

    def restricted_values(self) -> np.ndarray:
        return self.values[self.grid.out_dofs]

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def l2_norm(self) -> float:
        return float(np.sqrt(self.grid.weights @ self.values**2))

    def h1_norm(self) -> float:
        s = self.grid.unit_stiffness
        return float(np.sqrt(self.grid.weights @ self.values**2 + self.values @ (s @ self.values)))

    def mean_density(self) -> float:
        return float(self.grid.weights @ self.values / self.grid.measure_omega())

    def min_over_out(self) -> float:
        return float(np.min(self.values[self.grid.mask_out]))

    def copy(self) -> "Field":
        return Field(self.grid, self.values.copy(), self.domain)


def h1_distance(a: Field, b: Field) -> float:
    """H1 norm of a - b on the shared grid (restricted fields enter through
    their zero extensions)."""
    if a.grid is not b.grid:
        raise ValueError("fields live on different grids")
    diff = a.values - b.values
    s = a.grid.unit_stiffness
    return float(np.sqrt(a.grid.weights @ diff**2 + diff @ (s @ diff)))


def sup_distance(a: Field, b: Field) -> float:
    if a.grid is not b.grid:
        raise ValueError("fields live on different grids")
    return float(np.max(np.abs(a.values - b.values)))
