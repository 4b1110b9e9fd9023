"""Exception hierarchy shared by the engine, counters and estimator."""


class GoldbachError(Exception):
    """Base class for all library errors."""


class DomainError(GoldbachError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ResourceLimitError(GoldbachError):
    """A request would exceed the configured sieve limit or memory budget."""


class CacheFormatError(GoldbachError, ValueError):
    """A pi cache file is malformed."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
