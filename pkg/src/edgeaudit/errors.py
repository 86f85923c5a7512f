"""Exception types shared across the package."""


class EdgeAuditError(Exception):
    """Base class for all package errors."""


class InputError(EdgeAuditError, ValueError):
    """Malformed argument: bad edge index, mismatched vertex counts, bad config."""


class CapacityError(EdgeAuditError):
    """Requested exhaustive enumeration exceeds the configured cap."""

    def __init__(self, n: int, cap: int):
        self.n = n
        self.cap = cap
        super().__init__(
            f"n={n} exceeds the enumeration cap of n <= {cap} "
            f"({2 ** (cap * (cap - 1) // 2)} graphs)"
        )


class ConditioningError(EdgeAuditError, ValueError):
    """Conditioning on a secret of probability zero."""
