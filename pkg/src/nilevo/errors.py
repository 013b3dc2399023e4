"""Exception types shared across the package."""


class NilevoError(Exception):
    pass


class UnsupportedFieldError(NilevoError):
    """Raised when an operation needs a finite field (or a finite square-class group)."""


class BudgetExceededError(NilevoError):
    """Raised when an enumeration or search passes its configured cap."""


class DimensionMismatchError(NilevoError, ValueError):
    pass


class InternalConsistencyError(NilevoError):
    """Two independent computations of the same quantity disagreed."""
