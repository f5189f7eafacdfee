"""Exception types raised across the package."""


class LambdaBecError(Exception):
    """Base class for all package errors."""


class DomainError(LambdaBecError, ValueError):
    """An argument lies outside the domain of an operation."""


class SingularityError(LambdaBecError):
    """A denominator vanished (for example Γ at some detuning)."""

    def __init__(self, message, delta=None):
        super().__init__(message)
        self.delta = delta


class ConditioningError(LambdaBecError):
    """A linear system was singular or too badly conditioned to trust."""

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class UnsupportedZoneError(LambdaBecError):
    """The boundary zone M = 2r has no realization here."""


class InvalidSectorError(LambdaBecError):
    """Sector violates the validity bound or has bad quantum numbers."""


class DegenerateError(LambdaBecError):
    """Rabi frequency vanished, so the rotation angle is undefined."""


class TruncationError(LambdaBecError):
    """Too much Poisson weight was dropped by the excitation cutoff."""


class UnsupportedStateError(LambdaBecError):
    """Closed forms were asked for a state they do not describe."""


class MissingSectorError(LambdaBecError):
    """Evolution was requested without data for some sectors."""

    def __init__(self, missing):
        self.missing = sorted(missing)
        super().__init__(f"missing sector data for M = {self.missing}")


class ConfigError(LambdaBecError):
    """Bad configuration document; carries the offending line number."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
