"""Error taxonomy shared by the library and the CLI.

The CLI maps these onto exit codes: DomainError -> 2, ResourceError -> 3,
UsageError -> 64.
"""


class DivilabError(Exception):
    """Base class for all divilab errors."""


class DomainError(DivilabError, ValueError):
    """Input outside the mathematical domain of an operation."""


class ResourceError(DivilabError, RuntimeError):
    """Request exceeds a configured capability cap (memory, sieve range, ...)."""


class ConstraintError(DomainError):
    """A structural constraint failed validation (names the first offender)."""


class UsageError(DivilabError):
    """Bad command line or manifest."""
