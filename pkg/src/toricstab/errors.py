"""Exception types shared across the package."""


class ToricError(Exception):
    """Base class for all errors raised by toricstab."""


class SchemaError(ToricError, ValueError):
    """Malformed input data (wrong shapes, bad JSON, unparsable rationals)."""


class PreconditionError(ToricError, ValueError):
    """A mathematical precondition of an operation does not hold."""


class UnsupportedError(ToricError, NotImplementedError):
    """The construction is outside what the library can compute."""
