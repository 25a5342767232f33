"""Cluster-dynamics statistics of a completed tracking run."""

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from ..exceptions import EmptyInput
from ..models import Clustering, TrajectoryPoint
from .tracker import TrackRegistry


@dataclass(frozen=True)
class RunSummary:
    """Summary statistics of a tracking run.

    Attributes:
        lifetimes: Lifetime of every track, in snapshots.
        clusters_per_snapshot: Cluster count of every processed snapshot.
        power_fractions: Percentage of clustered power held by each cluster
            in each snapshot.
        trajectories: Filtered centroid trajectory per track ID.
    """

    lifetimes: tuple[int, ...]
    clusters_per_snapshot: tuple[int, ...]
    power_fractions: tuple[float, ...]
    trajectories: dict[int, tuple[TrajectoryPoint, ...]]


def lifetimes(registry: TrackRegistry) -> list[int]:
    """Lifetime of every track, ordered by track ID.

    Tracks still active at the end of the run count up to the final
    snapshot.
    """
    return [track.lifetime for track in registry.all_tracks]


def clusters_per_snapshot(clusterings: Sequence[Clustering]) -> list[int]:
    """Number of clusters in each snapshot's final clustering."""
    return [clustering.cluster_count for clustering in clusterings]


def snapshot_power_fractions(clustering: Clustering) -> list[float]:
    """Percentage of the snapshot's clustered power held by each cluster."""
    total = clustering.total_power
    return [cluster.power / total * 100.0 for cluster in clustering.clusters]


def power_fractions(clusterings: Sequence[Clustering]) -> list[float]:
    """Power percentage of every cluster-snapshot pair."""
    return [
        fraction
        for clustering in clusterings
        for fraction in snapshot_power_fractions(clustering)
    ]


def centroid_trajectories(
    registry: TrackRegistry,
) -> dict[int, tuple[TrajectoryPoint, ...]]:
    """Filtered positions and velocities of every track, by track ID."""
    return {track.cluster_id: track.history for track in registry.all_tracks}


def histogram(
    values: Sequence[float] | npt.ArrayLike,
    bin_width: float,
) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.int64]]:
    """Histogram with fixed-width, left-closed bins.

    Bins start at floor(min(values)) and step by bin_width until the
    largest value is covered.

    Args:
        values: Values to count.
        bin_width: Width of each bin, > 0.

    Returns:
        Tuple of (bin edges, counts); len(edges) == len(counts) + 1.

    Raises:
        EmptyInput: If values is empty.
        ValueError: If bin_width is not positive.
    """
    data = np.asarray(values, dtype=float).ravel()
    if data.size == 0:
        raise EmptyInput("Histogram of no values")
    if bin_width <= 0:
        raise ValueError(f"bin_width must be positive (got {bin_width})")

    start = math.floor(data.min())
    n_bins = int(math.floor((data.max() - start) / bin_width)) + 1
    edges = start + bin_width * np.arange(n_bins + 1, dtype=float)
    # Rounding in the bin count can leave the maximum on the last edge or
    # add an empty trailing bin.
    while edges[-1] <= data.max():
        edges = np.append(edges, start + bin_width * len(edges))
    while edges[-2] > data.max():
        edges = edges[:-1]
    n_bins = len(edges) - 1
    # Left-closed bins: bin i holds edges[i] <= v < edges[i + 1].
    index = np.searchsorted(edges, data, side="right") - 1
    counts = np.bincount(index, minlength=n_bins)
    return edges, counts.astype(np.int64)


def summarize(
    clusterings: Sequence[Clustering],
    registry: TrackRegistry,
) -> RunSummary:
    """Collect all run statistics."""
    return RunSummary(
        lifetimes=tuple(lifetimes(registry)),
        clusters_per_snapshot=tuple(clusters_per_snapshot(clusterings)),
        power_fractions=tuple(power_fractions(clusterings)),
        trajectories=centroid_trajectories(registry),
    )
