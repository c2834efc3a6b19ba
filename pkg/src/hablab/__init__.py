"""hablab: a numerical laboratory for habitat degradation and destruction
in reaction-diffusion population models.

Degradation applies a linear sink -c*u on a region B inside the domain;
destruction is the c -> infinity limit, a hostile hole with a zero
Dirichlet condition on its interface.  The package computes the four
principal eigenvalues tying the two regimes together, integrates both
Cauchy problems, locates extinction thresholds and verifies the
monotonicity/convergence structure at desk scale.
"""

__version__ = "0.1.0"

from .analysis import (
    ContourRow,
    SweepReport,
    ThresholdReport,
    contour_table,
    find_extinction_threshold,
    fit_decay_rate,
    sweep_c,
)
from .discretize import (
    DiscreteDomain,
    SparseOperator,
    assemble_destruction_laplacian,
    assemble_neumann_laplacian,
    build_grid,
)
from .dynamics import (
    EvolutionProblem,
    RegimeComparison,
    SteadyState,
    TimeSeries,
    compare_regimes,
    default_initial,
    evolve,
    steady_state,
    step,
)
from .errors import (
    BracketError,
    ClassificationError,
    ConvergenceError,
    DataError,
    GridError,
    HablabError,
    ScenarioError,
    SolverError,
    StabilityError,
)
from .fields import Field, h1_distance, sup_distance
from .landscape import (
    DESTRUCTION,
    Box,
    Destruction,
    GrowthProfile,
    Landscape,
    build_landscape,
    c_star,
    habitat_fraction_removed,
    landscape_to_toml,
    load_landscape,
)
from .spectral import (
    EigenResult,
    lambda_degradation,
    lambda_destruction,
    mu_degradation,
    mu_destruction,
)

__all__ = [
    "__version__",
    "Box",
    "BracketError",
    "ClassificationError",
    "ContourRow",
    "ConvergenceError",
    "DataError",
    "DESTRUCTION",
    "Destruction",
    "DiscreteDomain",
    "EigenResult",
    "EvolutionProblem",
    "Field",
    "GridError",
    "GrowthProfile",
    "HablabError",
    "Landscape",
    "RegimeComparison",
    "ScenarioError",
    "SolverError",
    "SparseOperator",
    "StabilityError",
    "SteadyState",
    "SweepReport",
    "ThresholdReport",
    "TimeSeries",
    "assemble_destruction_laplacian",
    "assemble_neumann_laplacian",
    "build_grid",
    "build_landscape",
    "c_star",
    "compare_regimes",
    "contour_table",
    "default_initial",
    "evolve",
    "find_extinction_threshold",
    "fit_decay_rate",
    "h1_distance",
    "habitat_fraction_removed",
    "lambda_degradation",
    "lambda_destruction",
    "landscape_to_toml",
    "load_landscape",
    "mu_degradation",
    "mu_destruction",
    "steady_state",
    "step",
    "sup_distance",
    "sweep_c",
]
