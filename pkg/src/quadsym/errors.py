"""Exception types shared across the package."""


class QuadsymError(Exception):
    """Base class for all errors raised by quadsym."""


class ArgumentError(QuadsymError, ValueError):
    """Invalid argument: wrong shape, out-of-range parameter, bad name."""


class ValidationError(QuadsymError, ValueError):
    """Input data violates a structural invariant (e.g. asymmetric block)."""


class SingularityError(QuadsymError, ArithmeticError):
    """A formula hit a singular point (division by zero, singular matrix)."""


class DivergenceError(QuadsymError, ArithmeticError):
    """Numerical integration drifted beyond the accepted symplectic defect."""
