"""Exception types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the range where a model is defined."""


class MeasurementError(ValueError):
    """A frame could not be measured (e.g. no dark pixels in the ROI)."""


class TraceFormatError(ValueError):
    """A CSV file is malformed or fails validation.

    ``line`` is the 1-based line number of the offending row when known.
    """

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
