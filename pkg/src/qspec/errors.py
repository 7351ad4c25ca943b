"""Exception hierarchy shared by the library and the CLI.

Each class carries the process exit code the CLI maps it to.
"""


class QSpecError(Exception):
    exit_code = 1


class DomainError(QSpecError, ValueError):
    """Argument outside the admissible parameter domain."""

    exit_code = 2


class PoleError(DomainError):
    """A denominator factor (b; q)_n vanished."""


class OverflowGuardError(DomainError):
    """Requested evaluation would overflow double precision."""


class IllConditionedError(QSpecError):
    exit_code = 3


class NonConvergedError(QSpecError):
    """An iteration failed its convergence test within the depth cap."""

    exit_code = 3


class BracketError(QSpecError):
    """A root bracket could not be established.

    ``cell`` holds the offending ``(lo, hi)`` interval when known.
    """

    exit_code = 4

    def __init__(self, message, cell=None):
        super().__init__(message)
        self.cell = cell
