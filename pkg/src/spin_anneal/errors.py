"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Raised when inputs violate a documented precondition."""


class DivergenceError(RuntimeError):
    """Raised when an integration trajectory leaves the allowed amplitude range."""
