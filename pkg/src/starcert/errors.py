"""Exception hierarchy shared by the starcert modules."""


class StarcertError(Exception):
    """Base class for every error raised by this package."""


class DomainError(StarcertError, ValueError):
    """An argument lies outside the documented domain of an operation."""


class SolverError(StarcertError):
    """Bracketed root finding did not meet its tolerance within budget."""


class AdmissibilityError(StarcertError):
    """The parameter chain left the admissible range 0 < beta <= beta0."""


class NoConclusionError(StarcertError):
    """The admissibility inequality cannot hold for any mu in (0, 1]."""


class ClassViolationError(StarcertError, ValueError):
    """A power series does not belong to the requested normalized class."""


class ZeroDenominatorError(StarcertError, ZeroDivisionError):
    """A quotient was requested where its denominator (numerically) vanishes."""


class ResolutionError(StarcertError):
    """Phase unwrapping could not resolve the curve at the allowed depth."""


class NonvanishingError(StarcertError):
    """A measured function winds around the origin on a sampled circle."""


class LadderMonotonicityError(StarcertError):
    """Per-rung maxima decreased along the radius ladder."""


class MeasurementAnomalyError(StarcertError):
    """A measurement produced a value that contradicts its input."""


class CoefficientFormatError(StarcertError, ValueError):
    """A coefficient file line could not be parsed."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
