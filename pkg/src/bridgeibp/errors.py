"""Exception types shared across the package."""


class BridgeIBPError(Exception):
    """Base class for all package-specific errors."""


class DomainError(BridgeIBPError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class NonFiniteIntegrandError(BridgeIBPError, ArithmeticError):
    """A quadrature integrand evaluated to a non-finite value."""


class QuadratureError(BridgeIBPError, ArithmeticError):
    """A quadrature rule failed to reach the requested tolerance."""


class ResolutionError(BridgeIBPError, ValueError):
    """A grid or window is too coarse for the requested operation."""


class SupportError(BridgeIBPError, ValueError):
    """A compactly supported function violates a required support constraint."""


class DegenerateVarianceError(BridgeIBPError, ValueError):
    """A Gaussian operation was requested with non-positive variance."""


class ResourceBudgetError(BridgeIBPError, MemoryError):
    """Materializing an object would exceed the configured memory budget."""


class NonFinitePathValueError(BridgeIBPError, ArithmeticError):
    """A path functional produced a non-finite value.

    Carries the index of the offending path in ``path_index``.
    """

    def __init__(self, message, path_index):
        super().__init__(message)
        self.path_index = path_index
