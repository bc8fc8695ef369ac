"""Exception hierarchy shared by the library and the CLI."""

from __future__ import annotations


class QNoiseError(Exception):
    """Base class for every error raised by :mod:`qnoise`."""

    #: process exit status used by the CLI
    exit_code = 3

    def __init__(self, message: str, **details):
        super().__init__(message)
        self.details = details

    def to_dict(self) -> dict:
        return {"error": type(self).__name__, "message": str(self), "details": self.details}


class ValidationError(QNoiseError, ValueError):
    """Bad input: wrong shape, out-of-range parameter, malformed config."""

    exit_code = 2


class DimensionError(ValidationError):
    """Matrix or subsystem dimensions do not line up."""


class NumericalError(QNoiseError, ArithmeticError):
    """A numerical contract was violated while computing."""

    exit_code = 3


class NotCompletelyPositiveError(NumericalError):
    """A chi-matrix has an eigenvalue below the PSD tolerance."""


class TraceDriftError(NumericalError):
    """Trace of a propagated state left its tolerance band."""
