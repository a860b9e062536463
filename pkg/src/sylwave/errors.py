"""Exception hierarchy shared by all sylwave modules."""

from __future__ import annotations


class SylwaveError(Exception):
    """Base class for every error raised by this package."""


class UsageError(SylwaveError, ValueError):
    """A call violated an operation's precondition (bad route, bad domain...)."""


class ParseError(SylwaveError, ValueError):
    """Malformed decimal/complex literal."""


class DomainError(UsageError):
    """Arguments outside the mathematical domain of the operation."""


class SingularSeriesError(SylwaveError, ZeroDivisionError):
    """Reciprocal/log/sqrt of a series whose constant term vanishes."""


class NearPoleError(SylwaveError, ArithmeticError):
    """Evaluation point too close to a pole for the working precision."""


class PoleError(NearPoleError):
    """Evaluation exactly at (or numerically on) a pole."""


class BranchError(SylwaveError, ArithmeticError):
    """Evaluation on (or sign ambiguity across) a branch cut."""


class PrecisionError(SylwaveError, ArithmeticError):
    """Self-check against a higher-precision or independent rerun failed."""


class ConvergenceError(SylwaveError, ArithmeticError):
    """An iteration failed to converge within its step budget."""


class NoZeroError(DomainError):
    """(A, B) outside the existence window of the dilogarithm zeros."""


class ZeroProductError(SylwaveError, ZeroDivisionError):
    """A sine-product factor vanishes exactly."""


class StaleSaddleError(PrecisionError):
    """Phase derivative at the supplied saddle is not numerically zero."""


class SelfCheckError(PrecisionError):
    """Closed-form cross-check of a computed quantity failed."""


class IdentityError(PrecisionError):
    """Residual of an exact identity exceeded its tolerance."""
