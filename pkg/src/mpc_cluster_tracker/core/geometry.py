"""Distance and shape mathematics for MPC clusters.

All point arguments are (L, 3) arrays of interaction coordinates in metres;
powers are linear.
"""

from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
from scipy.stats import multivariate_normal

from ..exceptions import DimensionMismatch, EmptyInput

FloatArray = npt.NDArray[np.float64]


@dataclass(frozen=True)
class AxisRanges:
    """Per-axis coordinate ranges used to normalize the MCD.

    Attributes:
        dx_max: Largest |x_i - x_j| over the normalization set.
        dy_max: Largest |y_i - y_j| over the normalization set.
        dz_max: Largest |z_i - z_j| over the normalization set.
    """

    dx_max: float
    dy_max: float
    dz_max: float

    def as_array(self) -> FloatArray:
        """Return the ranges as a length-3 array."""
        return np.array([self.dx_max, self.dy_max, self.dz_max], dtype=float)


def _as_points(points: npt.ArrayLike) -> FloatArray:
    return np.asarray(points, dtype=float).reshape(-1, 3)


def axis_ranges(points: npt.ArrayLike) -> AxisRanges:
    """Compute the per-axis range of a point set.

    Args:
        points: Points to normalize over.

    Returns:
        AxisRanges holding max - min per axis.

    Raises:
        EmptyInput: If no points are given.
    """
    pts = _as_points(points)
    if len(pts) == 0:
        raise EmptyInput("Axis ranges need at least one point")
    spans = np.ptp(pts, axis=0)
    return AxisRanges(float(spans[0]), float(spans[1]), float(spans[2]))


def _inverse_ranges(ranges: AxisRanges) -> FloatArray:
    # Zero-range axes contribute nothing to the distance.
    r = ranges.as_array()
    inv = np.zeros(3)
    np.divide(1.0, r, out=inv, where=r > 0)
    return inv


def mcd(a: npt.ArrayLike, b: npt.ArrayLike, ranges: AxisRanges) -> float:
    """Multipath component distance between two coordinates.

    Args:
        a: First coordinate.
        b: Second coordinate.
        ranges: Axis ranges of the normalization set.

    Returns:
        sqrt(sum over axes of (|a - b| / range)²).
    """
    diff = np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float))
    return float(np.linalg.norm(diff * _inverse_ranges(ranges)))


def mcd_matrix(
    points: npt.ArrayLike,
    centroids: npt.ArrayLike,
    ranges: AxisRanges,
) -> FloatArray:
    """MCD from every point to every centroid.

    Returns:
        (L, C) array with entry [l, c] = mcd(points[l], centroids[c]).
    """
    pts = _as_points(points)
    cents = _as_points(centroids)
    scaled = (pts[:, None, :] - cents[None, :, :]) * _inverse_ranges(ranges)
    return np.sqrt(np.einsum("lck,lck->lc", scaled, scaled))


def power_weights(powers: npt.ArrayLike) -> FloatArray:
    """Log-power weights log10(p / p_min) of a snapshot's paths."""
    p = np.asarray(powers, dtype=float)
    return np.log10(p / p.min())


def weighted_distance_matrix(
    points: npt.ArrayLike,
    powers: npt.ArrayLike,
    centroids: npt.ArrayLike,
    ranges: AxisRanges,
) -> FloatArray:
    """Power-weighted distance between all paths and all centroids.

    Args:
        points: Path coordinates.
        powers: Linear path powers, parallel to points.
        centroids: Current centroid guesses (at least one).
        ranges: Axis ranges of the normalization set.

    Returns:
        (L, C) array with entry [l, c] = log10(p_l / p_min) * mcd(l, c).

    Raises:
        DimensionMismatch: If points and powers differ in length or no
            centroid is given.
    """
    pts = _as_points(points)
    p = np.asarray(powers, dtype=float).ravel()
    cents = _as_points(centroids)
    if len(pts) != len(p):
        raise DimensionMismatch(
            f"Got {len(pts)} points but {len(p)} powers"
        )
    if len(cents) == 0:
        raise DimensionMismatch("At least one centroid is required")
    if len(pts) == 0:
        return np.zeros((0, len(cents)))
    return power_weights(p)[:, None] * mcd_matrix(pts, cents, ranges)


def weighted_centroid(points: npt.ArrayLike, powers: npt.ArrayLike) -> FloatArray:
    """Power-weighted mean position.

    Raises:
        EmptyInput: If no points are given.
    """
    pts = _as_points(points)
    if len(pts) == 0:
        raise EmptyInput("Centroid of an empty point set")
    return np.average(pts, axis=0, weights=np.asarray(powers, dtype=float))


def spread_matrix(
    points: npt.ArrayLike,
    powers: npt.ArrayLike,
    centroid: npt.ArrayLike,
) -> FloatArray:
    """Power-weighted 3x3 coordinate covariance around a centroid.

    Args:
        points: Member coordinates.
        powers: Member linear powers.
        centroid: The weighted centroid of the members.

    Returns:
        Symmetric positive semi-definite (3, 3) array.

    Raises:
        EmptyInput: If no points are given.
    """
    pts = _as_points(points)
    if len(pts) == 0:
        raise EmptyInput("Spread of an empty point set")
    p = np.asarray(powers, dtype=float)
    dev = pts - np.asarray(centroid, dtype=float)
    spread = (dev.T * p) @ dev / p.sum()
    return (spread + spread.T) / 2.0


def _regularized(spread: npt.ArrayLike, eps: float) -> FloatArray:
    return np.asarray(spread, dtype=float) + eps * np.eye(3)


def closeness(
    candidate: npt.ArrayLike,
    centroid: npt.ArrayLike,
    spread: npt.ArrayLike,
    eps: float,
) -> float:
    """Gaussian closeness of a centroid to a cluster.

    Evaluates the 3-D normal density with mean `centroid` and covariance
    `spread + eps * I` at `candidate`.
    """
    return float(
        multivariate_normal.pdf(
            np.asarray(candidate, dtype=float),
            mean=np.asarray(centroid, dtype=float),
            cov=_regularized(spread, eps),
        )
    )


def log_closeness(
    candidates: npt.ArrayLike,
    centroid: npt.ArrayLike,
    spread: npt.ArrayLike,
    eps: float,
) -> FloatArray:
    """Log of the closeness of several candidates to one cluster.

    Used for argmax comparisons where the density itself underflows.

    Returns:
        Array with one log-density per candidate row.
    """
    cands = _as_points(candidates)
    values = multivariate_normal.logpdf(
        cands,
        mean=np.asarray(centroid, dtype=float),
        cov=_regularized(spread, eps),
    )
    return np.atleast_1d(np.asarray(values, dtype=float))
