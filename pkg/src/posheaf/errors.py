"""Exception types shared across the package."""


class InputError(ValueError):
    """Malformed or inconsistent input data (CLI exit code 1)."""


class OperationNotAllowed(ValueError):
    """A row/column operation that violates the label order constraint."""


class SizeCapExceeded(RuntimeError):
    """A computation refused because it exceeds the configured size cap
    (CLI exit code 3)."""
