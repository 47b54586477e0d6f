"""Exception types shared across the package.

All of these derive from ValueError so that callers who do not care about
the fine distinctions can catch a single class.
"""


class InvalidInputError(ValueError):
    """Raised when an argument is outside the documented domain of an operation."""


class ConsistencyError(ValueError):
    """Raised when user-declared data contradicts the computed values."""


class CaseError(ValueError):
    """Raised when an operation is called outside the parameter case it supports."""


class PreconditionError(ValueError):
    """Raised when a structural precondition of an algorithm fails."""


class EvaluationError(ValueError):
    """Raised when a quantity cannot be evaluated at the requested point."""
