"""Principal eigenpairs of the linearized and indefinite-weight problems.

Four kinds are computed on a shared core:

* ``mu-degradation(c)``: smallest eigenvalue of -d*Lap - (theta*m - (1-theta)*c)
  on the full grid with zero-flux outer boundary;
* ``mu-destruction``: same with growth weight m on the region outside the
  degraded set, Dirichlet on its interface;
* ``lambda-degradation(c)`` / ``lambda-destruction``: the unique positive
  principal eigenvalue of the sign-indefinite weight problem, obtained as
  the positive root of lambda -> mu_1(d=1, lambda*weight), which is concave
  with a single sign change beyond its maximum.

All solves are generalized symmetric pencils P phi = mu W phi with the
diagonal lumped mass W; the principal pair is extremal and simple, so
shift-inverted power iteration with a sparse direct factorization is
robust even at extreme degradation rates.  Shift = Gershgorin lower bound
of W^{-1} P minus one.  Each solve is independent and reentrant.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .discretize import (
    DiscreteDomain,
    SparseOperator,
    assemble_destruction_laplacian,
    assemble_neumann_laplacian,
)
from .errors import BracketError, ConvergenceError, ScenarioError
from .fields import Field
from .landscape import c_star

RESIDUAL_SCALE = 1e-8
MAX_ITERATIONS = 500
ROOT_TOL = 1e-10
LAMBDA_MAX = 1e8


@dataclass
class EigenResult:
    """A principal eigenpair with solve diagnostics.

    `value` is the eigenvalue, `eigenfunction` the positive eigenfunction
    (zero-extended for destruction kinds), `residual` the discrete-L2 norm
    of the pointwise operator equation, `normalization` a tag naming the
    scaling convention.
    """

    kind: str
    value: float
    eigenfunction: Field
    residual: float
    normalization: str
    iterations: int
    c: float | None = None

    def __post_init__(self) -> None:
        if not self.residual <= RESIDUAL_SCALE * (abs(self.value) + 1.0):
            raise ConvergenceError(
                f"{self.kind}: residual {self.residual:.3e} above tolerance"
            )


def _gershgorin_lower(P: sp.csr_matrix, w: np.ndarray) -> float:
    """Lower bound for the pencil (P, W): Gershgorin row bound of W^{-1} P."""
    coo = P.tocoo()
    off = coo.row != coo.col
    rowabs = np.zeros(P.shape[0])
    np.add.at(rowabs, coo.row[off], np.abs(coo.data[off]))
    return float(np.min((P.diagonal() - rowabs) / w))


def _smallest_pencil_eigenpair(
    P: sp.csr_matrix,
    w: np.ndarray,
    start: np.ndarray | None = None,
    max_iter: int = MAX_ITERATIONS,
    tol_scale: float = RESIDUAL_SCALE,
) -> tuple[float, np.ndarray, float, int]:
    """Smallest eigenpair of P x = mu W x by shift-inverted power iteration.

    The iteration starts from the constant positive vector; the factored
    matrix is an M-matrix, so iterates remain positive and converge to the
    principal pair.  Returns (value, W-normalized vector, residual, its).
    """
    n = P.shape[0]
    sigma = _gershgorin_lower(P, w) - 1.0
    lu = splu((P - sigma * sp.diags(w)).tocsc())
    x = np.ones(n) if start is None else np.asarray(start, dtype=float).copy()
    x /= np.sqrt(w @ x**2)
    mu = np.inf
    resnorm = np.inf
    for it in range(1, max_iter + 1):
        y = lu.solve(w * x)
        x = y / np.sqrt(w @ y**2)
        Px = P @ x
        mu = float(x @ Px)
        res = Px - mu * (w * x)
        resnorm = float(np.sqrt(np.sum(res**2 / w)))
        if resnorm <= tol_scale * (abs(mu) + 1.0):
            if np.max(x) <= 0.0:
                x = -x
            # strictly positive in exact arithmetic; deep inside a strongly
            # degraded region the values may underflow to zero in float64
            if np.min(x) < 0.0:
                raise ConvergenceError(
                    "principal eigenfunction is not sign-definite"
                )
            return mu, x, resnorm, it
    raise ConvergenceError(
        f"eigensolve did not converge in {max_iter} iterations "
        f"(last residual {resnorm:.3e}, value {mu:.6e})"
    )


def _require_positive_outside(grid: DiscreteDomain, values: np.ndarray, kind: str) -> None:
    if not np.min(values) > 0.0:
        raise ConvergenceError(
            f"{kind}: eigenfunction is not strictly positive on the undisturbed region"
        )


def _degradation_weight(grid: DiscreteDomain, c: float) -> np.ndarray:
    """Discrete m_c: growth outside, -c inside, dual-cell average on the
    interface (quadrature-consistent with the trapezoid rule)."""
    theta = grid.frac_out
    return theta * grid.m_values() - (1.0 - theta) * c


def _solve_mu(
    op: SparseOperator,
    q: np.ndarray,
    start: np.ndarray | None = None,
    tol_scale: float = RESIDUAL_SCALE,
) -> tuple[float, np.ndarray, float, int]:
    P = ((-op.matrix) - sp.diags(op.weights * q)).tocsr()
    return _smallest_pencil_eigenpair(P, op.weights, start=start, tol_scale=tol_scale)


def mu_degradation(grid: DiscreteDomain, d: float, c: float) -> EigenResult:
    """Principal eigenvalue of the linearized degradation problem."""
    if not c >= 0:
        raise ScenarioError(f"degradation rate must be >= 0, got {c}")
    op = assemble_neumann_laplacian(grid, d)
    q = _degradation_weight(grid, c)
    mu, x, res, its = _solve_mu(op, q)
    _require_positive_outside(grid, x[grid.mask_out], "mu-degradation")
    return EigenResult(
        kind="mu-degradation",
        value=mu,
        eigenfunction=Field(grid, x),
        residual=res,
        normalization="l2_unit",
        iterations=its,
        c=c,
    )


def mu_destruction(grid: DiscreteDomain, d: float) -> EigenResult:
    """Principal eigenvalue of the linearized destruction problem; with an
    empty degraded region this coincides with degradation at c = 0."""
    op = assemble_destruction_laplacian(grid, d)
    q = grid.m_values()[op.dofs]
    mu, x, res, its = _solve_mu(op, q)
    _require_positive_outside(grid, x, "mu-destruction")
    return EigenResult(
        kind="mu-destruction",
        value=mu,
        eigenfunction=Field.from_restricted(grid, x),
        residual=res,
        normalization="l2_unit",
        iterations=its,
    )


def _positive_root_of_mu(mu_of_lambda, lam_max: float = LAMBDA_MAX):
    """Positive root of a concave map lam -> mu(lam) that is positive left
    of the root.  Expanding bracket, then Illinois secant on |mu| <= tol.
    Returns (root, eigen data at the root)."""
    lo = 1.0
    mu_lo, data_lo = mu_of_lambda(lo)
    while mu_lo <= 0.0:
        lo /= 4.0
        if lo < 1e-12:
            raise BracketError("no positive eigenvalue bracket near 0")
        mu_lo, data_lo = mu_of_lambda(lo)
    hi = 2.0 * lo
    mu_hi, data_hi = mu_of_lambda(hi)
    while mu_hi > 0.0:
        lo, mu_lo, data_lo = hi, mu_hi, data_hi
        hi *= 2.0
        if hi > lam_max:
            raise BracketError(f"root not bracketed below lambda_max = {lam_max:g}")
        mu_hi, data_hi = mu_of_lambda(hi)
    a, fa = lo, mu_lo
    b, fb, data_b = hi, mu_hi, data_hi
    for _ in range(200):
        x = b - fb * (b - a) / (fb - fa)
        fx, data_x = mu_of_lambda(x)
        if abs(fx) <= ROOT_TOL:
            return x, data_x
        if fx * fb < 0.0:
            a, fa = b, fb
        else:
            fa *= 0.5  # Illinois step keeps the bracket moving
        b, fb, data_b = x, fx, data_x
    raise ConvergenceError("secant iteration for the weight problem stalled")


def _lambda_result(
    grid: DiscreteDomain,
    kind: str,
    op: SparseOperator,
    weight: np.ndarray,
    c: float | None,
) -> EigenResult:
    warm: dict[str, np.ndarray | None] = {"x": None}

    def mu_of_lambda(lam: float):
        # tighter inner tolerance: the weight-mass rescaling below inflates
        # the residual by 1/sqrt(mass)
        mu, x, res, its = _solve_mu(
            op, lam * weight, start=warm["x"], tol_scale=RESIDUAL_SCALE * 1e-2
        )
        warm["x"] = x
        return mu, (mu, x, res, its)

    lam, (_, x, _, its) = _positive_root_of_mu(mu_of_lambda)
    if op.kind == "destruction-restricted":
        _require_positive_outside(grid, x, kind)
    else:
        _require_positive_outside(grid, x[grid.mask_out], kind)
    # Normalize so the weighted mass int weight * psi^2 equals one.
    mass = float((op.weights * weight) @ x**2)
    if not mass > 0.0:
        raise ConvergenceError(f"{kind}: weighted mass is not positive")
    psi = x / np.sqrt(mass)
    # Residual of the weight equation Lap psi + lam * weight * psi = 0.
    res_vec = (-op.matrix) @ psi - lam * (op.weights * weight) * psi
    residual = float(np.sqrt(np.sum(res_vec**2 / op.weights)))
    if op.kind == "destruction-restricted":
        eigenfunction = Field.from_restricted(grid, psi)
    else:
        eigenfunction = Field(grid, psi)
    return EigenResult(
        kind=kind,
        value=lam,
        eigenfunction=eigenfunction,
        residual=residual,
        normalization="weight_mass_unit",
        iterations=its,
        c=c,
    )


def lambda_degradation(grid: DiscreteDomain, c: float) -> EigenResult:
    """Unique positive principal eigenvalue of the indefinite-weight problem
    with weight m_c; requires the mean weight to be negative (c > c_star)."""
    cs = c_star(grid.landscape)
    if not c > cs:
        raise ScenarioError(
            f"weight problem needs c > c_star = {cs:.6g}, got c = {c:g}"
        )
    op = assemble_neumann_laplacian(grid, 1.0)
    weight = _degradation_weight(grid, c)
    return _lambda_result(grid, "lambda-degradation", op, weight, c)


def lambda_destruction(grid: DiscreteDomain) -> EigenResult:
    """Unique positive principal eigenvalue of the destruction weight
    problem; requires a nonempty degraded region and positive growth
    somewhere outside it."""
    if not grid.landscape.b_region:
        raise ScenarioError("destruction weight problem needs a nonempty degraded region")
    op = assemble_destruction_laplacian(grid, 1.0)
    weight = grid.m_values()[op.dofs]
    if not np.any(weight > 0):
        raise ScenarioError("growth must be positive somewhere outside the degraded region")
    return _lambda_result(grid, "lambda-destruction", op, weight, None)


def rayleigh_quotient(grid: DiscreteDomain, d: float, c: float, phi: Field) -> float:
    """Variational quotient (d-gradient energy minus weighted mass) over the
    L2 mass; equals the mu-degradation eigenvalue at its eigenfunction."""
    op = assemble_neumann_laplacian(grid, d)
    q = _degradation_weight(grid, c)
    v = phi.values
    num = op.dirichlet_energy(v) - float((op.weights * q) @ v**2)
    den = float(op.weights @ v**2)
    return num / den
