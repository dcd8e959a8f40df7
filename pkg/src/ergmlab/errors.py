"""Exception types shared across the package."""


class ErgmError(Exception):
    """Base class for package errors."""


class ConfigError(ErgmError, ValueError):
    """A model or chain configuration could not be parsed or is invalid.

    ``key`` names the offending configuration entry when one is known.
    """

    def __init__(self, message, key=None):
        super().__init__(message if key is None else f"{key}: {message}")
        self.key = key


class UnsupportedSize(ErgmError, ValueError):
    """Input exceeds a brute-force size limit."""


class DegenerateParameters(ErgmError, ValueError):
    """A closed-form expression is evaluated outside its validity region
    (non-positive denominator)."""


class PreconditionError(ErgmError, RuntimeError):
    """An experiment was asked to run outside the subcritical region."""
