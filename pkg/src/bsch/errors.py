"""Exception types shared across the package."""


class BschError(Exception):
    """Base class for all package-specific errors."""


class DomainError(BschError):
    """A graph or potential was evaluated outside its domain."""


class ConvergenceError(BschError):
    """An iterative scalar/pointwise solve failed to reach tolerance."""


class ConformityError(BschError):
    """A coupled field violated the trace-conformity requirement."""


class MeanError(BschError):
    """A right-hand side violated the zero generalized-mean requirement."""


class ShapeError(BschError):
    """Array shapes or trajectory layouts do not match."""


class NewtonDivergence(BschError):
    """The implicit time-step Newton iteration failed.

    Carries the residual-norm trace of the failed solve in ``trace``.
    """

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = list(trace) if trace is not None else []


class PotentialDomainError(BschError):
    """A pointwise potential solve failed during time stepping."""


class ConfigError(BschError):
    """A run configuration is malformed; message carries a JSON-pointer path."""


class DegenerateFit(BschError):
    """Too few usable points remain for a log-log slope fit."""
