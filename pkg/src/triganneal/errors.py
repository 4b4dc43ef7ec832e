"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Malformed input: bad indices, broken invariants, unparseable files."""


class CapacityError(ValidationError):
    """Problem size exceeds what an operation is willing to handle."""


class GenerationError(RuntimeError):
    """Instance generation failed to find an acceptable formula."""


class LanczosError(RuntimeError):
    """Lanczos iteration failed to converge.

    Carries the best residual norms seen so far in ``best_residuals``.
    """

    def __init__(self, message, best_residuals=None):
        super().__init__(message)
        self.best_residuals = best_residuals


class FitError(RuntimeError):
    """Nonlinear fit could not be set up (degenerate or invalid data)."""
