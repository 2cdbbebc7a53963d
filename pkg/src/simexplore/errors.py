"""Exception hierarchy shared across the engine."""


class SimExploreError(Exception):
    """Base class for all errors raised by this package."""


# --- dataset model / mapping ---

class UnknownColumn(SimExploreError):
    """A variable mapping names a column that does not exist."""


class ArityMismatch(SimExploreError):
    """A raw row does not have the same number of cells as the header."""


class InvalidMapping(SimExploreError):
    """The variable mapping is internally inconsistent."""


class UnassignableRow(SimExploreError):
    """A row has an empty method or DGM cell and cannot be placed in a stratum."""


# --- ingestion ---

class IngestError(SimExploreError):
    """Base class for parsing and fetching problems."""


class UnsupportedFormat(IngestError):
    pass


class DecompressError(IngestError):
    pass


class AmbiguousArchive(IngestError):
    """A zip archive contains more than one file entry."""


class EncodingError(IngestError):
    """Payload is not valid UTF-8."""


class RaggedRows(IngestError):
    def __init__(self, row_index: int, message: str | None = None):
        self.row_index = row_index
        super().__init__(message or f"row {row_index} has the wrong number of cells")


class EmptyInput(IngestError):
    pass


class TooLarge(IngestError):
    pass


class NetworkError(IngestError):
    pass


class BadStatus(IngestError):
    def __init__(self, status: int):
        self.status = status
        super().__init__(f"unexpected HTTP status {status}")


# --- performance measures ---

class MeasureError(SimExploreError):
    """A measure cannot be computed from the available ingredients."""


class NoTruth(MeasureError):
    pass


class NoSEs(MeasureError):
    pass


class NoIntervals(MeasureError):
    pass


class Undefined(MeasureError):
    """Too few usable repetitions for the requested quantity."""


class NoReference(MeasureError):
    pass


class UnpairedRepetitions(MeasureError):
    pass


class MissingIngredient(MeasureError):
    pass


# --- plot data ---

class PlotError(SimExploreError):
    pass


class NoCommonRepetitions(PlotError):
    pass


class GroupTooSmall(PlotError):
    pass


class MeasureUnavailable(PlotError):
    pass


class EmptyPlot(PlotError):
    pass


class NonNumericVariable(SimExploreError):
    pass


# --- export ---

class EmptySelection(SimExploreError):
    pass


class NonFinite(SimExploreError):
    pass
