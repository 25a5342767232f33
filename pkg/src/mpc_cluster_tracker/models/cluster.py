"""Cluster observation data models."""

from dataclasses import dataclass, replace

import numpy as np
import numpy.typing as npt


@dataclass(frozen=True, eq=False)
class ClusterParams:
    """Parameters of one cluster observed in one snapshot.

    Attributes:
        cluster_id: Cluster ID c. Local index after clustering, track ID
            once the tracker has labelled it.
        members: Path IDs of the member MPCs.
        power: Cluster power, the sum of member powers.
        centroid: Power-weighted centroid, metres.
        spread: Power-weighted 3x3 coordinate covariance, m².
    """

    cluster_id: int
    members: frozenset[int]
    power: float
    centroid: npt.NDArray[np.float64]
    spread: npt.NDArray[np.float64]

    @property
    def size(self) -> int:
        """Return the number of member MPCs L_c."""
        return len(self.members)

    def with_id(self, cluster_id: int) -> "ClusterParams":
        """Return a copy carrying a different cluster ID."""
        return replace(self, cluster_id=cluster_id)


@dataclass(frozen=True, eq=False)
class Clustering:
    """Result of clustering one snapshot.

    Attributes:
        clusters: Cluster parameters, indexed by local cluster index.
        assignment: Local cluster index of every retained MPC.
        path_ids: Path ID of every retained MPC, parallel to assignment.
        objective: Sum over MPCs of power times MCD to the own centroid.
        iterations: Lloyd iterations used in the final round.
        restarts: Number of low-power restarts performed.
    """

    clusters: tuple[ClusterParams, ...]
    assignment: npt.NDArray[np.int64]
    path_ids: npt.NDArray[np.int64]
    objective: float
    iterations: int = 0
    restarts: int = 0

    @property
    def cluster_count(self) -> int:
        """Return the number of clusters."""
        return len(self.clusters)

    @property
    def total_power(self) -> float:
        """Return the power carried by all clusters."""
        return float(sum(c.power for c in self.clusters))

    def relabel(self, cluster_ids: list[int]) -> "Clustering":
        """Return a copy whose clusters carry the given IDs, in order."""
        if len(cluster_ids) != len(self.clusters):
            raise ValueError("One ID per cluster is required")
        return replace(
            self,
            clusters=tuple(
                cluster.with_id(cid) for cluster, cid in zip(self.clusters, cluster_ids)
            ),
        )
