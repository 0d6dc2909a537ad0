"""Exception types shared across the package."""


class CrnflowError(Exception):
    """Base class for all package-specific failures."""


class NetworkParseError(CrnflowError):
    """A reaction-network file was rejected; carries the offending line number."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ConfigError(CrnflowError):
    """A run-configuration file was rejected; carries the offending line number."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NoComplexBalance(CrnflowError):
    """No positive complex-balanced equilibrium was found for the network."""


class MassNotReachable(CrnflowError):
    """The requested conserved totals are not realized by any positive equilibrium."""


class NeitherConditionHolds(CrnflowError):
    """Diffusion coefficients satisfy neither structural condition for entropy decay."""


class StepFailed(CrnflowError):
    """An implicit time step failed to converge even after time-step halving."""

    def __init__(self, message, state=None, time=None):
        super().__init__(message)
        self.state = state
        self.time = time


class InsufficientDecayData(CrnflowError):
    """Too few usable samples to fit a decay rate or dissipation ratio."""
