"""Exception types shared across the package.

The CLI maps UsageError (and its subclasses) to exit code 2; a failed
mathematical verification is not an exception but a report with
``passed = False``, mapped to exit code 1.
"""


class DotlabError(Exception):
    """Base class for all package errors."""


class UsageError(DotlabError):
    """A caller violated an operation's precondition or supplied bad input."""


class DomainError(UsageError):
    """An input is outside the mathematical domain of the operation
    (e.g. the origin has no argument)."""
