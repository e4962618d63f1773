"""Exception types shared across the package."""

from __future__ import annotations


class QuanvError(Exception):
    """Base class for all quanv3d errors."""


class InvalidParameterError(QuanvError, ValueError):
    """An argument violates a documented precondition."""


class RepresentationError(QuanvError, TypeError):
    """A state was passed in the wrong representation (pure vs density)."""


class ResourceLimitError(QuanvError):
    """The request exceeds a hard size limit (e.g. qubit count)."""


class FormatError(QuanvError):
    """A file does not conform to its binary/text format.

    Carries the byte offset at which the problem was detected.
    """

    def __init__(self, message: str, offset: int | None = None):
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class IllConditionedError(QuanvError):
    """A linear system is singular or numerically unusable.

    Raised by the ridge solver when alpha=0 leaves the normal equations
    singular; the fix is almost always to use alpha > 0.
    """
