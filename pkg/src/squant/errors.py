"""Exception types shared across the package."""

from __future__ import annotations


class DimensionMismatchError(ValueError):
    """Vector or matrix operands disagree on dimensionality."""


class InvalidScheduleError(ValueError):
    """Learning-rate schedule violates its constructor constraints."""


class InvalidConfigError(ValueError):
    """Run configuration is internally inconsistent."""


class UnboundedRegionError(ValueError):
    """An operation required a bounded box region."""


class UndefinedContrastError(ValueError):
    """Contrast ratio is undefined: a point coincides with a center."""


class DivergenceError(RuntimeError):
    """An iterative run produced non-finite or exploding values.

    Carries the partial convergence trace collected up to the failure so
    callers can inspect what went wrong.
    """

    def __init__(self, message: str, trace=None):
        super().__init__(message)
        self.trace = trace


class FormatError(ValueError):
    """Base class for file-format violations; carries the byte offset."""

    def __init__(self, message: str, offset: int = 0):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class MagicMismatchError(FormatError):
    """File does not start with the expected magic string."""


class TruncatedFileError(FormatError):
    """File body is shorter than its header declares."""

    def __init__(self, message: str, offset: int, expected: int, actual: int):
        super().__init__(f"{message}: expected {expected} bytes, got {actual}", offset)
        self.expected = expected
        self.actual = actual


class LabelRangeError(FormatError):
    """A stored label falls outside {-1} U [0, class_count)."""
