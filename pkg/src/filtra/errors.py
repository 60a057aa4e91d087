"""Exception types shared across the package."""


class FiltraError(Exception):
    """Base class for all package errors."""


class ValidationError(FiltraError, ValueError):
    """An input violates a documented precondition."""


class SpaceMismatchError(ValidationError):
    """Two values that must share an outcome space do not."""


class CapacityError(FiltraError):
    """An operation would exceed a configured size cap."""


class DegenerateInputError(ValidationError):
    """The input is structurally valid but degenerate (e.g. a
    zero-probability atom passed to conditional averaging)."""


class PolicyDomainError(ValidationError):
    """A policy has no action for a reachable decision input."""
