"""Exception hierarchy shared by the library and the CLI.

Each error carries the process exit code the CLI uses for it.
"""

from __future__ import annotations


class WpvolError(Exception):
    """Base class for every error raised by wpvol."""

    exit_code = 1


class InvalidArgumentError(WpvolError, ValueError):
    """An argument violates a documented precondition."""

    exit_code = 2


class TruncationOverflowError(WpvolError):
    """A series was asked for coefficients beyond its truncation order."""

    exit_code = 3

    def __init__(self, required: int, available: int, what: str = "series"):
        self.required = required
        self.available = available
        super().__init__(
            f"{what} is truncated at order {available} but order {required} is required; "
            f"rerun with --order {required} or a larger MAX_GENUS"
        )


class NotInvertibleError(WpvolError, ArithmeticError):
    """Leading coefficient of a series is not a unit of the exact ring."""


class MemoFileError(WpvolError):
    """Memo persistence file is unreadable, from another version or another curve."""


class CheckFailedError(WpvolError):
    """At least one acceptance criterion failed."""

    exit_code = 1
