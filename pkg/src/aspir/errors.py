"""Exception types shared across the package."""


class AspirError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(AspirError):
    """Syntax, arity, or safety error in program text.

    Carries the source position and, for token-level errors, the set of
    token kinds that would have been accepted.
    """

    def __init__(self, message, span=None, expected=()):
        self.span = span
        self.expected = tuple(expected)
        where = f"{span}: " if span is not None else ""
        hint = f" (expected {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{where}{message}{hint}")


class ProgramError(AspirError):
    """A program value violates an operation's precondition."""


class ExternalError(AspirError):
    """Unknown external predicate, arity mismatch, or bad table file."""


class LimitError(AspirError):
    """A configured resource bound was exceeded (never silently truncated)."""
