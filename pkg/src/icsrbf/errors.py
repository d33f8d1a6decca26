"""Exception types shared across the package."""


class IcsrbfError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(IcsrbfError, ValueError):
    """A parameter is outside its documented valid range."""


class SmoothnessError(IcsrbfError, ValueError):
    """A derivative order beyond the kernel's smoothness class was requested."""


class DomainError(IcsrbfError, ValueError):
    """A nonlinearity was evaluated outside its real domain.

    Carries the offending location and value so solvers can reject the step.
    """

    def __init__(self, message, x=None, y=None):
        super().__init__(message)
        self.x = x
        self.y = y


class SolverError(IcsrbfError, RuntimeError):
    """The nonlinear solver hit an unrecoverable condition (singular Jacobian)."""


class ConfigError(IcsrbfError, ValueError):
    """Invalid run configuration (bad grid parameters, unknown problem, ...)."""
