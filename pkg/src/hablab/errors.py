"""Exception hierarchy. Validation failures and solver failures map to
distinct CLI exit codes (2 and 3 respectively)."""


class HablabError(Exception):
    """Base class for all package errors."""


class ScenarioError(HablabError, ValueError):
    """Invalid scenario document or problem data."""


class GridError(HablabError, ValueError):
    """Geometry cannot be represented at the requested resolution."""


class DataError(HablabError, ValueError):
    """Analysis input (time series, table) violates a precondition."""


class SolverError(HablabError, RuntimeError):
    """Base class for numerical failures."""


class ConvergenceError(SolverError):
    """Iteration did not reach its tolerance within the budget."""


class BracketError(SolverError):
    """A root/threshold bracket could not be established."""


class StabilityError(SolverError):
    """Time integration left the stable range for the chosen step."""


class ClassificationError(SolverError):
    """Steady-state norm test disagrees with the eigenvalue sign."""
