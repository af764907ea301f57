"""Exception types shared across the package."""


class LinkclustError(Exception):
    """Base class for every error raised by this package."""


class EmptyInputError(LinkclustError):
    """The input contained no usable data rows."""


class MalformedRowError(LinkclustError):
    """A data row did not match the expected arity."""

    def __init__(self, line_number: int, message: str):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class BadConfigError(LinkclustError):
    """A configuration value is out of range or inconsistent."""


class BadAttributeError(LinkclustError):
    """An attribute index fell outside 1..r."""


class BadInputError(LinkclustError):
    """Mismatched or inconsistent inputs to an operation."""


class InvalidMoveError(LinkclustError):
    """Adding a membership that exists, or removing one that does not."""


class ThresholdNotFoundError(LinkclustError):
    """No grid threshold produced the requested number of clusters."""


class MetricUndefinedError(LinkclustError):
    """Accuracy and error are undefined on an empty confusion matrix."""
