"""Exception types shared across the toolkit."""


class ScaletrendError(Exception):
    """Base class for all toolkit errors."""


class FormatError(ScaletrendError):
    """Input file does not have the expected structure (header, schema)."""


class ParseError(ScaletrendError):
    """A row of an input file could not be parsed."""

    def __init__(self, row: int, message: str):
        super().__init__(f"row {row}: {message}")
        self.row = row


class RangeError(ScaletrendError):
    """A value is outside its permitted range."""

    def __init__(self, message: str, row: int | None = None):
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)
        self.row = row


class DomainError(ScaletrendError):
    """Argument outside the mathematical domain of a function."""


class EmptyCorpusError(ScaletrendError):
    """A corpus-level operation received no songs."""


class EmptySeriesError(ScaletrendError):
    """An operation requiring data received an empty series."""


class InsufficientDataError(ScaletrendError):
    """Not enough data points for the requested computation."""


class DegenerateFitError(ScaletrendError):
    """Mixture fit collapsed (shared sigma hit the floor)."""


class InvalidClusteringError(ScaletrendError):
    """Clustering does not satisfy silhouette preconditions."""


class NoValidScaleError(ScaletrendError):
    """Every candidate component count failed to produce a valid fit."""


class InsufficientComponentsError(ScaletrendError):
    """Temperament error needs at least two scale components."""


class DegenerateRegressorError(ScaletrendError):
    """Regression x values are all identical."""
