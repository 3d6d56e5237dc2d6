"""Exception types shared across the package.

The CLI maps these to exit codes: validation/usage problems exit 2,
capability-cap overruns exit 3.
"""


class EgallocError(Exception):
    """Base class for all package errors."""


class ValidationError(EgallocError):
    """Malformed or inconsistent input (bad rationals, invalid specs, ...)."""


class ParseError(ValidationError):
    """Malformed instance/result document; message carries a location."""


class PreconditionError(EgallocError):
    """An operation was called outside its stated precondition."""


class CapabilityError(EgallocError):
    """Input exceeds a hard cap of an exhaustive routine."""
