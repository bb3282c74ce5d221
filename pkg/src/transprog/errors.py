"""Exception hierarchy shared across the package."""


class TransprogError(Exception):
    """Base class for all package errors."""


class ParseError(TransprogError):
    """Fatal parse failure (malformed XML, truncated stream, duplicate ids)."""

    def __init__(self, message: str, *, offset: int | None = None, line: int | None = None):
        self.offset = offset
        self.line = line
        where = []
        if offset is not None:
            where.append(f"byte offset {offset}")
        if line is not None:
            where.append(f"line {line}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)


class TrainingError(TransprogError):
    """Embedding training could not proceed (empty corpus, empty vocabulary, exploded norms)."""


class NoInformationError(TransprogError):
    """A document or term carries no usable tokens, so no vector can be produced."""


class ModelFormatError(TransprogError):
    """A model/axis file has the wrong magic, version, or is truncated."""


class AxisError(TransprogError):
    """Axis construction failed (empty anchor set, degenerate axis)."""


class ScoreError(TransprogError):
    """Projection failed (zero vector, dimension mismatch)."""


class ReportError(TransprogError):
    """A report precondition is unmet (missing group, no scored records, zero variance)."""
