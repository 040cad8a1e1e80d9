"""Exception taxonomy shared across the package.

Every failure a caller can act on gets its own class so the CLI can map
families onto exit codes (usage -> 1, data -> 2, numerical -> 3).
"""


class PipelineError(Exception):
    """Base class for all package-specific errors."""


class InvalidConfig(PipelineError):
    """A configuration value is out of its documented range."""


class InvalidMatrix(PipelineError):
    """A matrix argument contains non-finite entries."""


class ShapeMismatch(PipelineError):
    """Array dimensions do not line up for the requested operation."""


class NumericalFailure(PipelineError):
    """A linear system could not be solved to working precision."""


class SingularMatrix(NumericalFailure):
    """Pivoting found no usable pivot; the system is singular."""


class InsufficientExtrema(PipelineError):
    """Too few extrema to construct a spline envelope."""


class DegenerateLabels(PipelineError):
    """Training data does not contain every class."""


class InvalidLabel(PipelineError):
    """A label outside the known class vocabulary."""


class InsufficientClassMembers(PipelineError):
    """A class has fewer members than the number of folds."""


class ParseError(PipelineError):
    """A malformed row or value in an input file."""


class FormatError(PipelineError):
    """Structurally valid input that violates a homogeneity rule."""


class NotFound(PipelineError):
    """A requested record id is absent from the input."""
