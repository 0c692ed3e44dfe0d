"""Shared exception types.

The split mirrors the CLI exit-code contract: user mistakes (bad syntax,
violated preconditions) are InvalidInputError, well-formed requests with no
answer in their domain (empty polyhedron, element of <u>) are DomainError,
and structured nontermination is BudgetExceededError / NotDissolvableError.
InternalError marks a violated theorem-shaped postcondition, i.e. a bug.
"""


class CharpolyError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(CharpolyError):
    """Caller-supplied data violates a documented precondition."""


class DomainError(CharpolyError):
    """A well-formed request has no answer in its domain."""


class BudgetExceededError(CharpolyError):
    """An iterative routine hit its step budget before finishing.

    Never a silently wrong answer: the message describes the progress made,
    and drivers convert this into a structured report.
    """

    def __init__(self, message, events=()):
        super().__init__(message)
        self.events = tuple(events)


class NotDissolvableError(CharpolyError):
    """A face-dissolution search failed; carries the attempted support."""

    def __init__(self, message, support=()):
        super().__init__(message)
        self.support = tuple(support)


class InternalError(CharpolyError):
    """A postcondition that is a theorem failed; indicates a bug."""
