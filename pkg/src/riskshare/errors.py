"""Exception hierarchy shared by all modules."""


class RiskshareError(Exception):
    """Base class for library errors."""


class DomainError(RiskshareError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class ConeError(DomainError):
    """Distribution support incompatible with the required cone."""


class ShapeError(DomainError):
    """Distortion curve lacks a required shape property."""


class RegimeError(DomainError):
    """Inputs fall outside the regime where a result is claimed."""


class NotRepresentableError(DomainError):
    """Allocation does not admit the requested structural form."""

    def __init__(self, message, max_deviation=float("nan")):
        super().__init__(message)
        self.max_deviation = max_deviation


class DivergenceError(RiskshareError, ArithmeticError):
    """A tail integral does not converge."""


class ConvergenceError(RiskshareError, ArithmeticError):
    """An iterative solver failed to converge."""
