"""Exception types raised across the package."""


class CompwaveError(Exception):
    """Base class for all package errors."""


class DomainError(CompwaveError, ValueError):
    """An argument lies outside the domain of an operation."""


class ClassificationError(CompwaveError, ValueError):
    """Far-field states do not belong to the requested wave configuration."""


class OrderingError(CompwaveError, ValueError):
    """Far-field strains are not strictly increasing."""


class BracketError(CompwaveError, RuntimeError):
    """A root-finding bracket does not enclose a sign change."""


class VerificationFailure(CompwaveError, RuntimeError):
    """A verification scan did not find the expected behaviour."""


class BlowUpError(CompwaveError, RuntimeError):
    """The time integrator produced non-finite values.

    Attributes
    ----------
    last_valid_time : float
        Simulation time of the last state with finite fields.
    """

    def __init__(self, message, last_valid_time):
        super().__init__(message)
        self.last_valid_time = last_valid_time


class ConfigError(CompwaveError, ValueError):
    """Malformed or inconsistent experiment configuration."""
