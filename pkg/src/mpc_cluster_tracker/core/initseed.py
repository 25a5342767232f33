"""Initial-guess centroids for per-snapshot clustering."""

from collections.abc import Sequence
from dataclasses import dataclass
from enum import StrEnum

import numpy as np
import numpy.typing as npt

from ..models import PipelineConfig
from .geometry import AxisRanges, mcd_matrix, weighted_distance_matrix


class Provenance(StrEnum):
    """Where a seed centroid came from."""

    PREDICTED = "predicted"
    STRONGEST_PATH = "strongest_path"
    MAX_MIN = "max_min"


@dataclass(frozen=True, eq=False)
class SeedSet:
    """Initial-guess centroids for one snapshot.

    Attributes:
        centroids: (C, 3) array of seed positions.
        provenance: Origin of each seed, parallel to centroids.
    """

    centroids: npt.NDArray[np.float64]
    provenance: tuple[Provenance, ...]

    @property
    def size(self) -> int:
        """Return the number of seeds."""
        return len(self.provenance)


def _captured_power(
    points: npt.NDArray[np.float64],
    powers: npt.NDArray[np.float64],
    centroids: npt.NDArray[np.float64],
    ranges: AxisRanges,
) -> npt.NDArray[np.float64]:
    """Power captured by each centroid under nearest-MCD assignment."""
    nearest = np.argmin(mcd_matrix(points, centroids, ranges), axis=1)
    return np.bincount(nearest, weights=powers, minlength=len(centroids))


def _select_max_min(
    points: npt.NDArray[np.float64],
    powers: npt.NDArray[np.float64],
    centroids: npt.NDArray[np.float64],
    ranges: AxisRanges,
) -> int:
    """Index of the path with the largest weighted distance to its nearest centroid."""
    min_weighted = weighted_distance_matrix(points, powers, centroids, ranges).min(axis=1)
    best = float(min_weighted.max())
    if best > 0:
        return int(np.argmax(min_weighted))
    # Every path has zero weight or sits on a centroid; fall back to plain MCD.
    return int(np.argmax(mcd_matrix(points, centroids, ranges).min(axis=1)))


def _extend_max_min(
    centroids: list[npt.NDArray[np.float64]],
    provenance: list[Provenance],
    points: npt.NDArray[np.float64],
    powers: npt.NDArray[np.float64],
    ranges: AxisRanges,
    cfg: PipelineConfig,
    checked_from: int,
) -> SeedSet:
    """Append max-min seeds until k_max or the centroid power rule stops.

    Every seed from index checked_from on must capture more than
    min_centroid_power_frac of the power in the candidate set. A new seed
    can take paths from earlier ones, so all of them are re-checked.
    """
    threshold = cfg.min_centroid_power_frac * float(powers.sum())

    while len(centroids) < cfg.k_max:
        current = np.array(centroids)
        selected = _select_max_min(points, powers, current, ranges)
        candidate = np.vstack([current, points[selected]])

        captured = _captured_power(points, powers, candidate, ranges)
        if np.any(captured[checked_from:] <= threshold):
            break

        centroids.append(points[selected].copy())
        provenance.append(Provenance.MAX_MIN)

    return SeedSet(
        centroids=np.array(centroids, dtype=float).reshape(-1, 3),
        provenance=tuple(provenance),
    )


def seed_from_scratch(
    points: npt.ArrayLike,
    powers: npt.ArrayLike,
    ranges: AxisRanges,
    cfg: PipelineConfig,
) -> SeedSet:
    """Seed a snapshot that has no cluster predictions.

    The strongest path is the first centroid. Further centroids are the
    paths with the maximum minimum weighted distance to the centroids
    chosen so far, until k_max is reached or a new centroid would leave
    some centroid after the first with no more than
    min_centroid_power_frac of the snapshot power (the new centroid is
    then discarded).

    Args:
        points: (L, 3) path coordinates.
        powers: Linear path powers.
        ranges: MCD axis ranges.
        cfg: Pipeline configuration.

    Returns:
        SeedSet with at least one centroid.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 3)
    p = np.asarray(powers, dtype=float)
    strongest = int(np.argmax(p))
    return _extend_max_min(
        [pts[strongest].copy()],
        [Provenance.STRONGEST_PATH],
        pts,
        p,
        ranges,
        cfg,
        checked_from=1,
    )


def seed_from_prediction(
    predicted: npt.ArrayLike,
    points: npt.ArrayLike,
    powers: npt.ArrayLike,
    ranges: AxisRanges,
    cfg: PipelineConfig,
    track_powers: Sequence[float] | None = None,
) -> SeedSet:
    """Seed a snapshot from Kalman-predicted cluster centroids.

    Predictions beyond k_max are dropped, keeping the tracks with the
    highest last observed power. The set is then extended with max-min
    seeds while the centroid power rule allows.

    Args:
        predicted: (K, 3) predicted centroid positions, K >= 1.
        points: (L, 3) path coordinates.
        powers: Linear path powers.
        ranges: MCD axis ranges.
        cfg: Pipeline configuration.
        track_powers: Last observed power of each predicted track.

    Returns:
        SeedSet starting with the kept predictions.
    """
    pred = np.asarray(predicted, dtype=float).reshape(-1, 3)
    if len(pred) == 0:
        raise ValueError("seed_from_prediction needs at least one prediction")

    if len(pred) > cfg.k_max:
        if track_powers is None:
            keep = np.arange(cfg.k_max)
        else:
            # Stable sort keeps the lower index on equal power.
            order = np.argsort(-np.asarray(track_powers, dtype=float), kind="stable")
            keep = np.sort(order[: cfg.k_max])
        pred = pred[keep]

    return _extend_max_min(
        [row.copy() for row in pred],
        [Provenance.PREDICTED] * len(pred),
        np.asarray(points, dtype=float).reshape(-1, 3),
        np.asarray(powers, dtype=float),
        ranges,
        cfg,
        checked_from=len(pred),
    )
