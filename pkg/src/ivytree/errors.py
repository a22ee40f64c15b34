class InputError(ValueError):
    """Malformed or inconsistent user-supplied data."""


class ConsistencyError(RuntimeError):
    """An internal invariant failed; the biset data cannot come from a Thurston map."""
