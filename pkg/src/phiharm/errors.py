"""Exception types shared across the package."""


class PhiharmError(Exception):
    """Base class for all package-specific errors."""


class DomainError(PhiharmError, ValueError):
    """An argument is outside the mathematical domain of the operation."""


class RangeError(PhiharmError, ValueError):
    """A requested value cannot be bracketed / reached inside the working range."""


class ExpressionError(PhiharmError, ValueError):
    """Parse or evaluation failure in the expression DSL."""

    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class ValidationError(PhiharmError, ValueError):
    """A constructed object fails its structural checks."""


class ResourceError(PhiharmError, RuntimeError):
    """A configured resource budget (e.g. vertex count) was exceeded."""


class SolverError(PhiharmError, RuntimeError):
    """Iterative solve failed; carries the last residual and sweep count."""

    def __init__(self, message: str, residual: float = float("nan"), sweeps: int = 0):
        self.residual = residual
        self.sweeps = sweeps
        super().__init__(f"{message} (residual={residual:.3e}, sweeps={sweeps})")
