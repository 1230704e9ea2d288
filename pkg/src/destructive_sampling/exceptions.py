"""Exceptions shared across the package."""


class DomainError(ValueError):
    """An argument violates a documented precondition."""


class SizeLimitError(ValueError):
    """A lot or trial count exceeds the configured scale guard."""


class NotComputable(RuntimeError):
    """Raised by quantities that provably have no value under the model."""


class MonotonicityError(RuntimeError):
    """A monotonicity assumption used for early termination failed to hold.

    Carries a diagnostic instead of letting a search return a wrong minimum.
    """
