"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid configuration: bad grid/motility/scenario/stepper parameters."""


class SolverFailure(RuntimeError):
    """A time step produced an unacceptable state (negativity beyond
    tolerance or non-finite values)."""

    def __init__(self, message: str, kind: str = "negativity"):
        super().__init__(message)
        self.kind = kind
