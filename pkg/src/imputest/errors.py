"""Exception hierarchy shared by all modules.

The CLI maps each category to its own exit code.
"""


class ImputestError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class ConfigError(ImputestError, ValueError):
    """Bad configuration: unknown keys, unknown summary ids, invalid values."""

    exit_code = 2


class DomainError(ImputestError, ValueError):
    """Input outside the mathematical domain of an operation."""

    exit_code = 5


class SaturationError(DomainError):
    """Closed-form distance MLE does not exist (log of a nonpositive argument)."""

    exit_code = 3


class BoundaryError(DomainError):
    """Closed-form MLE inversion lands outside the rate parameter space."""

    exit_code = 3


class NumericalError(ImputestError, ArithmeticError):
    """Numerical failure: non-convergence, degenerate fit, failed decomposition."""

    exit_code = 4

    def __init__(self, message, last_iterate=None):
        super().__init__(message)
        self.last_iterate = last_iterate


class ConvergenceError(NumericalError):
    """Iterative fit exhausted ``max_iter``; ``last_iterate`` holds the final state."""


class DegenerateFitError(NumericalError):
    """A fitted component collapsed or a conditioning event has zero probability."""
