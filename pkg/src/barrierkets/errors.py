"""Exception types shared across the package."""


class DomainError(ValueError):
    """An input lies outside the mathematical domain of the operation."""


class AccuracyError(RuntimeError):
    """A numerical routine could not certify the requested tolerance.

    Carries the best available estimate so callers can still inspect it.
    """

    def __init__(self, message, value=None, error=None):
        super().__init__(message)
        self.value = value
        self.error = error


class CapabilityError(RuntimeError):
    """The request exceeds a configured structural limit (order cap, node budget)."""


class ConditioningError(RuntimeError):
    """An intermediate linear problem is too ill-conditioned to trust."""
