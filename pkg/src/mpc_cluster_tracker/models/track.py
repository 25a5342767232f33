"""Cluster track data model."""

from dataclasses import dataclass, replace

import numpy as np
import numpy.typing as npt

from .cluster import ClusterParams

POSITION_SLICE = slice(0, None, 2)
VELOCITY_SLICE = slice(1, None, 2)


@dataclass(frozen=True, eq=False)
class TrajectoryPoint:
    """Filtered centroid state of a track at one snapshot."""

    snapshot: int
    position: npt.NDArray[np.float64]
    velocity: npt.NDArray[np.float64]


@dataclass(frozen=True, eq=False)
class TrackState:
    """Kalman state and bookkeeping of one tracked cluster.

    Attributes:
        cluster_id: Track ID, stable while the cluster is associated.
        theta: State [x, dx, y, dy, z, dz] (metres, metres per snapshot).
        cov: 6x6 state covariance M.
        born_at: Snapshot index of the first observation.
        last_seen: Snapshot index of the latest observation.
        last_cluster: Latest observed cluster, used for association.
        history: Filtered position and velocity per observed snapshot.
    """

    cluster_id: int
    theta: npt.NDArray[np.float64]
    cov: npt.NDArray[np.float64]
    born_at: int
    last_seen: int
    last_cluster: ClusterParams
    history: tuple[TrajectoryPoint, ...] = ()

    @property
    def lifetime(self) -> int:
        """Return the number of processed snapshots in which the track was observed.

        Equals last_seen - born_at + 1 when snapshot indices have no gaps.
        """
        return len(self.history)

    @property
    def position(self) -> npt.NDArray[np.float64]:
        """Return the filtered centroid position."""
        return self.theta[POSITION_SLICE]

    @property
    def velocity(self) -> npt.NDArray[np.float64]:
        """Return the filtered centroid velocity."""
        return self.theta[VELOCITY_SLICE]

    @property
    def power(self) -> float:
        """Return the last observed cluster power."""
        return self.last_cluster.power

    def observed(
        self,
        theta: npt.NDArray[np.float64],
        cov: npt.NDArray[np.float64],
        cluster: ClusterParams,
        snapshot_index: int,
    ) -> "TrackState":
        """Return the state after associating a new observation."""
        point = TrajectoryPoint(
            snapshot=snapshot_index,
            position=theta[POSITION_SLICE].copy(),
            velocity=theta[VELOCITY_SLICE].copy(),
        )
        return replace(
            self,
            theta=theta,
            cov=cov,
            last_seen=snapshot_index,
            last_cluster=cluster.with_id(self.cluster_id),
            history=self.history + (point,),
        )
