"""KPowerMeans clustering of one snapshot.

Lloyd iterations alternate nearest-centroid assignment under the MCD with
power-weighted centroid updates. A clustering in which any cluster holds
less than min_cluster_power_frac of the clustered power is restarted from
the seed set with its weakest seed removed.
"""

import numpy as np
import numpy.typing as npt

from ..exceptions import IterationLimitExceeded
from ..models import ClusterParams, Clustering, PipelineConfig
from .geometry import AxisRanges, mcd_matrix, spread_matrix, weighted_centroid
from .initseed import SeedSet

IntArray = npt.NDArray[np.int64]
FloatArray = npt.NDArray[np.float64]


def prune_noise(
    points: npt.ArrayLike,
    powers: npt.ArrayLike,
    cfg: PipelineConfig,
) -> IntArray:
    """Drop the weakest paths that together carry at most 1 - power_keep_frac.

    Args:
        points: (L, 3) path coordinates.
        powers: Linear path powers.
        cfg: Pipeline configuration.

    Returns:
        Ascending indices of the retained paths.
    """
    p = np.asarray(powers, dtype=float)
    order = np.argsort(p, kind="stable")
    budget = (1.0 - cfg.power_keep_frac) * p.sum()
    removable = np.cumsum(p[order]) <= budget
    return np.sort(order[~removable])


def assign(
    points: npt.ArrayLike,
    powers: npt.ArrayLike,
    centroids: npt.ArrayLike,
    ranges: AxisRanges,
) -> IntArray:
    """Map every path to the centroid minimizing power times MCD.

    Ties go to the lowest centroid index.
    """
    p = np.asarray(powers, dtype=float)
    cost = p[:, None] * mcd_matrix(points, centroids, ranges)
    return np.argmin(cost, axis=1)


def update_centroids(
    points: npt.ArrayLike,
    powers: npt.ArrayLike,
    assignment: npt.ArrayLike,
    k: int,
) -> FloatArray:
    """Weighted centroid of every non-empty cluster.

    Empty cluster indices are omitted, so the result may have fewer than
    k rows.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 3)
    p = np.asarray(powers, dtype=float)
    labels = np.asarray(assignment)
    rows = [
        weighted_centroid(pts[labels == c], p[labels == c])
        for c in range(k)
        if np.any(labels == c)
    ]
    return np.array(rows, dtype=float).reshape(-1, 3)


def objective(
    points: npt.ArrayLike,
    powers: npt.ArrayLike,
    centroids: npt.ArrayLike,
    assignment: npt.ArrayLike,
    ranges: AxisRanges,
) -> float:
    """Sum of power times MCD from each path to its assigned centroid."""
    labels = np.asarray(assignment)
    dist = mcd_matrix(points, centroids, ranges)
    own = dist[np.arange(len(labels)), labels]
    return float(np.dot(np.asarray(powers, dtype=float), own))


def _lloyd(
    points: FloatArray,
    powers: FloatArray,
    seeds: FloatArray,
    ranges: AxisRanges,
    max_iters: int,
) -> tuple[FloatArray, IntArray, IntArray, int, bool]:
    """Run Lloyd iterations from the given seeds.

    Returns:
        Tuple of (centroids, assignment, seed index of each centroid,
        iterations, converged).
    """
    centroids = seeds
    seed_index = np.arange(len(seeds))
    assignment: IntArray | None = None

    for iteration in range(1, max_iters + 1):
        new = assign(points, powers, centroids, ranges)
        if assignment is not None and np.array_equal(new, assignment):
            return centroids, new, seed_index, iteration, True
        occupied = np.unique(new)
        # Relabel densely so cluster c is the c-th occupied centroid.
        remap = np.full(len(centroids), -1)
        remap[occupied] = np.arange(len(occupied))
        assignment = remap[new]
        seed_index = seed_index[occupied]
        centroids = update_centroids(points, powers, assignment, len(occupied))

    final = assign(points, powers, centroids, ranges)
    return centroids, final, seed_index, max_iters, np.array_equal(final, assignment)


def _build_clustering(
    points: FloatArray,
    powers: FloatArray,
    path_ids: IntArray,
    assignment: IntArray,
    ranges: AxisRanges,
    iterations: int,
    restarts: int,
) -> Clustering:
    occupied = np.unique(assignment)
    remap = np.full(int(assignment.max()) + 1, -1)
    remap[occupied] = np.arange(len(occupied))
    labels = remap[assignment]

    clusters = []
    for c in range(len(occupied)):
        mask = labels == c
        member_points = points[mask]
        member_powers = powers[mask]
        centroid = weighted_centroid(member_points, member_powers)
        clusters.append(
            ClusterParams(
                cluster_id=c,
                members=frozenset(int(pid) for pid in path_ids[mask]),
                power=float(member_powers.sum()),
                centroid=centroid,
                spread=spread_matrix(member_points, member_powers, centroid),
            )
        )

    centroids = np.array([cluster.centroid for cluster in clusters])
    return Clustering(
        clusters=tuple(clusters),
        assignment=labels,
        path_ids=path_ids,
        objective=objective(points, powers, centroids, labels, ranges),
        iterations=iterations,
        restarts=restarts,
    )


def cluster_snapshot(
    points: npt.ArrayLike,
    powers: npt.ArrayLike,
    seeds: SeedSet,
    ranges: AxisRanges,
    cfg: PipelineConfig,
    path_ids: npt.ArrayLike | None = None,
) -> Clustering:
    """Cluster one snapshot with KPowerMeans.

    Args:
        points: (L, 3) coordinates of the retained paths.
        powers: Linear powers of the retained paths.
        seeds: Initial-guess centroids (at least one).
        ranges: MCD axis ranges.
        cfg: Pipeline configuration.
        path_ids: Path ID of each retained path; defaults to 0..L-1.

    Returns:
        Clustering with fully populated cluster parameters.

    Raises:
        IterationLimitExceeded: If a round does not converge within
            max_lloyd_iters. The last clustering is attached.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 3)
    p = np.asarray(powers, dtype=float)
    ids = (
        np.arange(len(pts), dtype=np.int64)
        if path_ids is None
        else np.asarray(path_ids, dtype=np.int64)
    )
    seed_centroids = np.asarray(seeds.centroids, dtype=float).reshape(-1, 3)
    if len(seed_centroids) == 0:
        raise ValueError("cluster_snapshot needs at least one seed")

    total = p.sum()
    restarts = 0
    while True:
        _, assignment, seed_index, iterations, converged = _lloyd(
            pts, p, seed_centroids, ranges, cfg.max_lloyd_iters
        )
        if not converged:
            clustering = _build_clustering(
                pts, p, ids, assignment, ranges, iterations, restarts
            )
            raise IterationLimitExceeded(
                f"KPowerMeans did not converge within {cfg.max_lloyd_iters} iterations",
                clustering=clustering,
            )

        cluster_power = np.bincount(assignment, weights=p)
        if len(seed_centroids) == 1 or np.all(
            cluster_power >= cfg.min_cluster_power_frac * total
        ):
            return _build_clustering(pts, p, ids, assignment, ranges, iterations, restarts)

        # Seeds that ended up empty captured zero power.
        seed_power = np.zeros(len(seed_centroids))
        seed_power[seed_index] = cluster_power
        weakest = int(np.argmin(seed_power))
        seed_centroids = np.delete(seed_centroids, weakest, axis=0)
        restarts += 1
