"""Exception hierarchy shared by all modules."""


class LyapSpecError(Exception):
    """Base class for library errors."""


class ValidationError(LyapSpecError, ValueError):
    """A function or configuration violates a structural requirement."""


class DomainError(LyapSpecError, ValueError):
    """An argument lies outside the domain of the operation."""


class ConvergenceError(LyapSpecError, ArithmeticError):
    """A numerical limit or iteration failed to stabilise."""


class DerivativeZeroError(LyapSpecError, ArithmeticError):
    """The derivative vanishes where a Newton step needs it."""


class InfiniteValueError(LyapSpecError, ArithmeticError):
    """The function is +inf at the requested point."""


class NoSupportLineError(LyapSpecError, ValueError):
    """No support line of the requested slope exists."""


class DivisionError(LyapSpecError, ZeroDivisionError):
    """A formula would divide by alpha = 0."""


class ZeroAlphaError(DivisionError):
    """alpha = 0 must go through spectrum_at_zero."""


class DegenerateError(LyapSpecError, ArithmeticError):
    """A cylinder interval collapsed below floating point resolution."""


class DivergentError(LyapSpecError, ArithmeticError):
    """A partition sum or series diverges."""


class NoRootError(LyapSpecError, ValueError):
    """The pressure brackets never straddle zero."""


class UnsupportedTailError(LyapSpecError, ValueError):
    """An infinite partition has no analytic tail description."""


class OutOfDomainError(LyapSpecError, ValueError):
    """alpha lies outside the domain of the spectrum."""


class NotParabolicError(LyapSpecError, ValueError):
    """The operation needs a parabolic curve."""


class EmptyLevelSetError(LyapSpecError, ValueError):
    """No cylinder matches the requested Birkhoff level."""
