"""Exception types shared across the diagnostics engine."""


class GamdiagError(Exception):
    """Base class for all engine errors."""


class SchemaError(GamdiagError):
    """A required column is missing or a role mapping is inconsistent."""


class ParseError(GamdiagError):
    """A cell could not be parsed; carries the offending 1-based data row."""

    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column


class EmptyDatasetError(GamdiagError):
    """The input contained a header but no data rows."""


class DomainError(GamdiagError):
    """A parameter value lies outside the valid domain of a family or transform."""


class UnsupportedResidualError(GamdiagError):
    """The requested residual type is not defined for this family."""


class ConfigError(GamdiagError):
    """An operation was invoked without a required ingredient (e.g. simulations)."""


class DegenerateCurveError(GamdiagError):
    """A QQ curve has fewer than two points, so arc length is undefined."""
