"""Exception types shared across the library."""


class FractalCalcError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(FractalCalcError, ValueError):
    """An argument or specification is invalid (wrong range, wrong shape, ...)."""


class DomainError(FractalCalcError):
    """An evaluation was requested outside the span a table covers."""


class ResolutionError(FractalCalcError):
    """The requested quantity cannot be resolved at the available depth."""


class EstimationError(FractalCalcError):
    """Dimension estimation failed to bracket a crossing.

    Carries the diagnostic sweep so callers can inspect what was tried.
    """

    def __init__(self, message, alphas=None, ratios=None):
        super().__init__(message)
        self.alphas = alphas
        self.ratios = ratios


class NumericalBlowupError(FractalCalcError):
    """An integrated state exceeded the blow-up limit.

    ``trajectory`` holds the samples recorded up to the failing step, or None
    when the caller could not assemble one.
    """

    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory


class PreconditionError(FractalCalcError):
    """A verifier refused to run because required assumptions failed.

    ``failing`` lists the names of the conditions that did not hold.
    """

    def __init__(self, message, failing=()):
        super().__init__(message)
        self.failing = tuple(failing)


class ExpressionError(ParameterError):
    """A user-supplied expression was rejected by the safe evaluator."""
