"""
Exception hierarchy for the relaying-IRS simulator.

Library code raises these; only main.py catches them, logs the failure and
turns it into a nonzero exit status.
"""


class IrsRelayError(Exception):
    """Base class for every error raised by this project."""


# --- numerics ---

class NonHermitianError(IrsRelayError):
    pass


class NoConvergenceError(IrsRelayError):
    pass


class NotPSDError(IrsRelayError):
    pass


class DimensionMismatchError(IrsRelayError):
    pass


# --- channel ---

class NonPositiveDistanceError(IrsRelayError):
    pass


class ZeroDistanceError(IrsRelayError):
    pass


# --- rate / optimizer ---

class AlphaOutOfRangeError(IrsRelayError):
    pass


class PreconditionViolatedError(IrsRelayError):
    pass


class TooLargeError(IrsRelayError):
    pass


# --- experiment / config ---

class UnknownSchemeError(IrsRelayError):
    pass


class ParseError(IrsRelayError):
    """Malformed config file. `line` and `key` point at the offending spot."""

    def __init__(self, message: str, line: int | None = None, key: str | None = None):
        self.line = line
        self.key = key
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key '{key}'")
        suffix = f" ({', '.join(where)})" if where else ""
        super().__init__(f"{message}{suffix}")


class ValidationError(IrsRelayError):
    pass
