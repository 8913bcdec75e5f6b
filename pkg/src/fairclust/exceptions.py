"""Error types raised by the fairclust library."""


class FairclustError(Exception):
    """Base class for all fairclust errors."""


class EmptyDataset(FairclustError):
    """Dataset construction received zero points."""


class RaggedDimensions(FairclustError):
    """Points do not share a single dimensionality."""


class LengthMismatch(FairclustError):
    """Two per-group or per-point sequences disagree in length."""


class TauOutOfRange(FairclustError):
    """A quota fraction lies outside [0, 1/k]."""

    def __init__(self, group: int, value: float, k: int):
        self.group = group
        self.value = value
        self.k = k
        super().__init__(
            f"tau[{group}] = {value} outside [0, 1/k] for k={k}"
        )


class InfeasibleQuota(FairclustError):
    """Quotas sum past the group size (cannot occur for tau <= 1/k)."""


class SingleGroup(FairclustError):
    """Balance is undefined with fewer than two groups."""


class TooFewPoints(FairclustError):
    """Fewer data points than requested centers."""


class MissingColumn(FairclustError):
    """A recipe column is absent from the CSV header."""

    def __init__(self, column: str):
        self.column = column
        super().__init__(f"column {column!r} not found in CSV header")


class NonNumericCell(FairclustError):
    """A feature cell failed to parse as a number."""

    def __init__(self, row: int, column: str, value: str):
        self.row = row
        self.column = column
        self.value = value
        super().__init__(
            f"row {row}, column {column!r}: {value!r} is not numeric"
        )


class IoFailure(FairclustError):
    """File could not be read or written."""


class TooLarge(FairclustError):
    """Instance exceeds the exact-solver tractability guards."""


class ConfigError(FairclustError):
    """Experiment or recipe configuration is invalid."""


class EmptyTable(FairclustError):
    """A result table with no rows cannot be emitted."""
