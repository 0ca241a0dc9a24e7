"""Exception hierarchy shared by all modules."""


class CuspMomentError(Exception):
    """Base class; the CLI maps these to exit status 3."""


class DomainError(CuspMomentError, ValueError):
    """Argument outside the domain of an operation."""


class PoleError(DomainError):
    """Evaluation at a pole (e.g. Gamma at a non-positive integer)."""


class ConvergenceError(CuspMomentError, ArithmeticError):
    """A series, recurrence or quadrature failed to meet its tolerance."""


class TruncationError(ConvergenceError):
    """A hard cap was hit before the requested tail budget was met."""
