"""Exception and warning types shared across the package."""

from __future__ import annotations


class DataValidationError(ValueError):
    """Raised when an input file or record set fails validation.

    ``errors`` holds one ``(row, message)`` pair per offending record, with
    1-based row indices counted over data rows (the header is not a row).
    """

    def __init__(self, message: str, errors: list[tuple[int, str]] | None = None):
        super().__init__(message)
        self.errors: list[tuple[int, str]] = errors or []


class EstimationError(RuntimeError):
    """Raised when an estimator cannot produce a value from the given data."""


class ZeroVarianceError(EstimationError):
    """Sample has zero variance, so the bandwidth rule degenerates.

    Usually signals that the probability reports are discrete; switch to
    count densities instead of kernel smoothing.
    """


class BoxBindingWarning(RuntimeWarning):
    """The dual-variable optimum was found at the edge of the search box.

    The box is likely binding; rerun with a larger half-width."""


class SmallCellWarning(UserWarning):
    """A covariate cell was dropped because it holds too few observations."""


class DiscreteSuggestionWarning(UserWarning):
    """Reports take few distinct values; count densities may fit better."""


class EmptyRegionWarning(UserWarning):
    """The constructed confidence region is empty (lower endpoint above upper)."""
