"""Custom exceptions for MPC Cluster Tracker."""

from typing import Any


class MpcClusterTrackerError(Exception):
    """Base exception for all library errors."""


class ValidationError(MpcClusterTrackerError):
    """Input validation failed."""

    def __init__(self, message: str, snapshot_index: int | None = None):
        if snapshot_index is not None:
            message = f"Snapshot {snapshot_index}: {message}"
        super().__init__(message)
        self.snapshot_index = snapshot_index


class NonPositivePower(ValidationError):
    """An MPC carries zero or negative power."""


class NonFiniteCoordinate(ValidationError):
    """An MPC coordinate is NaN or infinite."""


class DuplicatePathId(ValidationError):
    """Two MPCs of one snapshot share a path ID."""


class EmptySnapshot(ValidationError):
    """A snapshot has no MPCs."""


class ConfigError(ValidationError):
    """Pipeline configuration is invalid."""


class InvalidSpec(ValidationError):
    """Synthetic scenario description is invalid."""


class GeometryError(MpcClusterTrackerError):
    """Distance or shape computation received unusable input."""


class EmptyInput(GeometryError):
    """An operation needing at least one value received none."""


class DimensionMismatch(GeometryError):
    """Parallel inputs have different lengths or shapes."""


class ClusteringError(MpcClusterTrackerError):
    """Per-snapshot clustering failed."""


class IterationLimitExceeded(ClusteringError):
    """Lloyd iterations did not converge within the configured limit.

    Attributes:
        clustering: The clustering reached at the last iteration.
    """

    def __init__(self, message: str, clustering: Any = None):
        super().__init__(message)
        self.clustering = clustering


class ParseError(MpcClusterTrackerError):
    """Snapshot file parsing failed."""

    def __init__(self, message: str, line_number: int | None = None):
        if line_number is not None:
            message = f"Line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class NonMonotonicSnapshots(MpcClusterTrackerError):
    """Snapshot indices are not strictly increasing."""


class ScoringError(MpcClusterTrackerError):
    """Scoring against ground truth failed."""


class TooManyClustersForExactMatching(ScoringError):
    """Exact cluster matching was requested for more than eight clusters."""


class ArtifactWriteError(MpcClusterTrackerError):
    """Writing run artifacts to disk failed."""
