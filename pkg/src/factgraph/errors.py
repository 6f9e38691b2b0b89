"""Exception types shared across the package."""


class FactGraphError(Exception):
    """Base class for all factgraph errors."""


class ParseError(FactGraphError):
    """A malformed record in an input file.

    Carries the 1-based line number so callers can skip-and-count or abort.
    """

    def __init__(self, message, line_number=None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class ResolutionError(FactGraphError):
    """One or more entity names could not be resolved to graph nodes."""

    def __init__(self, missing, suggestions=None):
        self.missing = list(missing)
        self.suggestions = dict(suggestions or {})
        shown = ", ".join(repr(m) for m in self.missing[:5])
        extra = "" if len(self.missing) <= 5 else f" (+{len(self.missing) - 5} more)"
        super().__init__(f"unresolved entity names: {shown}{extra}")


class ValidationError(FactGraphError):
    """Invalid configuration, arguments, or input shapes."""


class SnapshotError(FactGraphError):
    """A graph snapshot file is unreadable or malformed."""
