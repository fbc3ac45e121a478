"""Exception and warning types shared across the package."""

from __future__ import annotations


class DegeneracyError(Exception):
    """Raised when a quantity is undefined for the given inputs.

    Typical causes: coincident centroids where a minimal centroid gap sits
    in a denominator, an all-zero membership column, or a validity score
    whose normalizing range collapses to a point.
    """


class CsvParseError(ValueError):
    """CSV ingestion failure annotated with the offending location.

    `row` is the 1-based line number in the file (header included) and
    `column` the 1-based column number, when known.
    """

    def __init__(self, message: str, *, row: int | None = None, column: int | None = None):
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
        self.row = row
        self.column = column


class DegeneracyWarning(UserWarning):
    """A value fell back to its degenerate-case convention instead of failing.

    Example: a correlation over a zero-variance vector is reported as 0.
    """


class CentroidReseedWarning(UserWarning):
    """An empty cluster's centroid was re-seeded from the data."""
