"""Exception types raised by the solvers."""


class DomainError(ValueError):
    """An argument lies outside the domain an operation is defined on."""


class InfeasibleError(RuntimeError):
    """No feasible price exists for the requested configuration."""


class SolverError(RuntimeError):
    """A numerical search did not find the structure it relies on."""


class ConfigError(ValueError):
    """A scenario file is malformed; ``key`` names the offending entry."""

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key
