"""Exception types shared across the package."""


class InvariantError(ValueError):
    """An input object violates a documented invariant (bad state, bad table, bad vector)."""


class SizeCapError(RuntimeError):
    """A requested enumeration exceeds the configured size cap."""
