"""Exception hierarchy.

Every error carries the exit status the command line reports for it:
2 for configuration and argument problems, 1 for numerical or acceptance failures.
"""
from typing import Any, Optional


class SolitonLabError(Exception):
    """Base class for all laboratory errors."""

    exit_code = 1


class ConfigurationError(SolitonLabError):
    """Invalid configuration, refused step size or violated experiment hypothesis."""

    exit_code = 2

    def __init__(self, message: str, violations: Optional[list] = None):
        super().__init__(message)
        self.violations = list(violations or [message])


class ArgumentError(SolitonLabError, ValueError):
    """Invalid arguments to a library operation."""

    exit_code = 2


class IntegrationBlowupError(SolitonLabError):
    """An ODE integration produced a non-finite state."""


class ProfileInvariantError(SolitonLabError):
    """A produced profile violates one of its invariants."""


class SeriesError(SolitonLabError):
    """The exact series recursion failed; the triangular system makes this a bug."""


class SeriesModeError(SolitonLabError):
    """A symbolic-n series was used where numbers are required."""

    exit_code = 2


class GeometryError(SolitonLabError):
    """The inner arc of a wing degenerated (radius collapsed or budget exhausted)."""


class ConsistencyError(SolitonLabError):
    """Arc and graph charts of a wing disagree beyond the handoff tolerance."""


class TailError(SolitonLabError):
    """An asymptotic offset estimate is not stable along the tail."""


class StepError(SolitonLabError):
    """An implicit step did not converge."""

    def __init__(self, message: str, last_residual: float):
        super().__init__(message)
        self.last_residual = last_residual


class EvolutionAborted(SolitonLabError):
    """An evolution stopped early; the partial trajectory is attached."""

    def __init__(self, message: str, trajectory: Any, cause: Exception):
        super().__init__(message)
        self.trajectory = trajectory
        self.cause = cause


class AcceptanceFailure(SolitonLabError):
    """A run finished but its acceptance check did not pass."""
