"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Raised when inputs violate a documented precondition."""


class DatasetFormatError(ValidationError):
    """Raised when a dataset file is malformed or has an unsupported version."""


class NumericsError(RuntimeError):
    """Raised when a numerical routine fails to converge or degenerates."""
