"""Exception and warning types shared across the package."""


class LloydError(Exception):
    """Base class for all library errors."""


class DomainError(LloydError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class AiryRangeError(LloydError, OverflowError):
    """Airy argument beyond the representable range."""

    def __init__(self, message, bound):
        super().__init__(message)
        self.bound = bound


class SeriesConvergenceError(LloydError, ArithmeticError):
    """A power series did not meet its truncation test within the term budget."""

    def __init__(self, message, last_term):
        super().__init__(message)
        self.last_term = last_term


class AccuracyError(LloydError, ArithmeticError):
    """Estimated cancellation error exceeds the accuracy target."""

    def __init__(self, message, estimate):
        super().__init__(message)
        self.estimate = estimate


class IntegrandError(LloydError, ValueError):
    """The integrand returned a non-finite sample."""

    def __init__(self, message, abscissa):
        super().__init__(message)
        self.abscissa = abscissa


class TailStructureError(LloydError, ValueError):
    """Oscillatory tail is not monotone past its declared onset."""


class QuadratureError(LloydError, ArithmeticError):
    """Quadrature did not converge; ``result`` holds the best estimate."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class SingularityError(LloydError, ValueError):
    """Evaluation point coincides with a source or image point."""


class PreconditionError(LloydError, ValueError):
    """Inputs violate a documented precondition of an oracle check."""


class PhaseAccuracyWarning(UserWarning):
    """Phase k*R exceeds the double-precision validity bound."""


class InvariantError(LloydError, ValueError):
    """A domain object violates one of its invariants; ``field`` names it."""

    def __init__(self, message, field=None):
        super().__init__(message if field is None else f"{field}: {message}")
        self.field = field
