"""Base exception and warning classes.

Every exception carries the process exit code that ``namedcurves`` returns when it
reaches the command line entry point.
"""


class NamedCurvesWarning(Warning):
    """Base warning class."""


class NamedCurvesException(Exception):
    """Base exception class."""

    #: Exit code of the command line interface.
    exit_code = 1


class MissingInputFile(NamedCurvesException):
    """Raised when an input file does not exist."""

    exit_code = 2


class DimensionMismatch(NamedCurvesException):
    """Raised when images or maps that must be aligned are not."""

    exit_code = 3


class ImageTooSmall(NamedCurvesException):
    """Raised when an image is smaller than a metric's window."""

    exit_code = 3


class InvalidArtifact(NamedCurvesException):
    """Raised on malformed or invalid artifact files and values."""

    exit_code = 4


class UnsupportedFormat(InvalidArtifact):
    """Raised when an image file is not a supported PNG."""


class BadMagic(InvalidArtifact):
    """Raised when a color naming table has the wrong header."""


class TableDimensionMismatch(InvalidArtifact):
    """Raised when a color naming table payload does not match its header."""


class NonNormalizedBin(InvalidArtifact):
    """Raised when a color naming table bin is not a probability distribution."""


class InvalidControlPoints(InvalidArtifact):
    """Raised when control points violate the curve invariants."""


class DegenerateIncrements(InvalidArtifact):
    """Raised when increments sum to zero and define no curve."""


class BadResolution(InvalidArtifact):
    """Raised when a lookup table resolution is below two samples."""


class MalformedCurveFile(InvalidArtifact):
    """Raised when a curve file cannot be parsed."""

    def __init__(self, message, line_no=None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        #: One-based line number of the offending record, if known.
        self.line_no = line_no


class EmptyCorpus(NamedCurvesException):
    """Raised when a corpus directory contains no image pairs."""

    exit_code = 5


class IndexOutOfRange(NamedCurvesException):
    """Raised when a probability plane index is out of range."""


class InvalidConfiguration(NamedCurvesException):
    """Raised on invalid configuration values."""


class BatchFailed(NamedCurvesException):
    """Raised when no pair of a corpus could be processed."""
