"""Exception types raised by the numerical routines."""


class FHTError(Exception):
    """Base class for all errors raised by this package."""


class PoleError(FHTError, ValueError):
    """Gamma-type function evaluated at a pole."""


class ParameterError(FHTError, ValueError):
    """Parameters outside the admissible set of a routine."""


class DomainError(FHTError, ValueError):
    """Argument outside the domain where the routine is defined."""


class GeometryError(DomainError):
    """Interval endpoints violate a1 < 0 < a2."""


class BelowThresholdError(DomainError):
    """Spectral parameter below the bottom of the continuous spectrum."""


class ExponentCollisionError(ParameterError):
    """Indicial exponents at the origin coincide (mu = 0)."""


class PrincipalValueError(DomainError):
    """Target point lies inside the source interval of a Hilbert transform."""


class WindowError(DomainError):
    """Evaluation point outside the validity window of an asymptotic formula."""


class PreconditionError(FHTError, ValueError):
    """Caller-declared precondition of a check is not satisfied."""


class ConvergenceError(FHTError, ArithmeticError):
    """A series or iteration did not converge within its cap."""


class MatchingPointError(FHTError, ArithmeticError):
    """Matching against the origin expansion failed or was ill-conditioned."""


class AccuracyError(FHTError, ArithmeticError):
    """An accuracy monitor (e.g. Wronskian drift) exceeded its threshold."""


class ConsistencyError(FHTError, ArithmeticError):
    """Two independent evaluation routes disagree."""


class ConvergenceRadiusWarning(UserWarning):
    """Series evaluated outside its recommended radius."""
