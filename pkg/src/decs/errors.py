"""Exception hierarchy shared by every pipeline stage."""


class DecsError(Exception):
    """Base class. ``reason`` is a stable machine-readable code."""

    reason = "error"

    def __init__(self, message: str = "", *, reason: str | None = None) -> None:
        super().__init__(message or self.reason)
        if reason is not None:
            self.reason = reason


class InputFormatError(DecsError):
    """Malformed file or record. Maps to CLI exit code 2."""

    reason = "input_format"


class EmptyResultError(DecsError):
    """An operation had nothing to work on. Maps to CLI exit code 3."""

    reason = "empty"
