from __future__ import annotations


class RaagError(Exception):
    """Base class for all errors raised by raagcert."""


class InputError(RaagError, ValueError):
    """Malformed input: unknown vertex, bad file, invalid parameters."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class OutOfRangeError(RaagError, ValueError):
    """A theorem or bound was requested outside the range where it holds."""


class CapabilityError(RaagError, RuntimeError):
    """An enumeration would exceed a configured cap."""

    def __init__(self, message: str, cap: int):
        self.cap = cap
        super().__init__(f"{message} (cap = {cap})")
