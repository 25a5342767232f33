"""Kalman tracking and association of clusters across snapshots.

The state of a cluster is theta = [x, dx, y, dy, z, dz] with a constant
velocity model of one snapshot per step. Clusters of consecutive snapshots
are associated when each is the other's closest under the Gaussian
closeness function; unassociated new clusters start new tracks and
unassociated old tracks are retired.
"""

from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
import scipy.linalg

from ..models import ClusterParams, Clustering, PipelineConfig, TrackState
from .geometry import log_closeness

FloatArray = npt.NDArray[np.float64]

_AXIS_TRANSITION = np.array([[1.0, 1.0], [0.0, 1.0]])
_AXIS_OBSERVATION = np.array([[1.0, 0.0]])


def _symmetrize(m: FloatArray) -> FloatArray:
    return (m + m.T) / 2.0


@dataclass(frozen=True, eq=False)
class KalmanModel:
    """Constant-velocity state-space model of a cluster centroid.

    Attributes:
        A: 6x6 state transition, I_3 kron [[1, 1], [0, 1]].
        D: 3x6 observation matrix, I_3 kron [1, 0].
        Q: 6x6 state-noise covariance.
        R: 3x3 observation-noise covariance.
        initial_cov: Covariance given to a newly born track.
    """

    A: FloatArray
    D: FloatArray
    Q: FloatArray
    R: FloatArray
    initial_cov: FloatArray

    @classmethod
    def build(
        cls,
        q_scale: float,
        r_scale: float,
        velocity_var_factor: float = 10.0,
    ) -> "KalmanModel":
        """Create the model for the given noise scales.

        Args:
            q_scale: State-noise variance, Q = q_scale * I_6.
            r_scale: Observation-noise variance, R = r_scale * I_3.
            velocity_var_factor: Birth velocity variance relative to r_scale.
        """
        eye3 = np.eye(3)
        return cls(
            A=np.kron(eye3, _AXIS_TRANSITION),
            D=np.kron(eye3, _AXIS_OBSERVATION),
            Q=q_scale * np.eye(6),
            R=r_scale * eye3,
            initial_cov=np.kron(
                eye3, np.diag([r_scale, velocity_var_factor * r_scale])
            ),
        )

    @classmethod
    def from_config(cls, cfg: PipelineConfig) -> "KalmanModel":
        """Create the model described by a pipeline config."""
        return cls.build(cfg.q_scale, cfg.r_scale, cfg.initial_velocity_var_factor)

    def initial_state(self, position: npt.ArrayLike) -> FloatArray:
        """State of a new track at rest at the given position."""
        theta = np.zeros(6)
        theta[0::2] = np.asarray(position, dtype=float)
        return theta

    def predicted_position(self, theta: FloatArray) -> FloatArray:
        """Position expected one step after the given state."""
        return self.D @ (self.A @ theta)


def predict(track: TrackState, model: KalmanModel) -> tuple[FloatArray, FloatArray]:
    """Kalman prediction step.

    Returns:
        Tuple of (predicted state A theta, predicted covariance A M A^T + Q).
    """
    theta_pred = model.A @ track.theta
    cov_pred = _symmetrize(model.A @ track.cov @ model.A.T + model.Q)
    return theta_pred, cov_pred


def update(
    theta_pred: npt.ArrayLike,
    cov_pred: npt.ArrayLike,
    observation: npt.ArrayLike,
    model: KalmanModel,
) -> tuple[FloatArray, FloatArray]:
    """Kalman update step with an observed cluster centroid.

    Returns:
        Tuple of (filtered state, filtered covariance).
    """
    theta_pred = np.asarray(theta_pred, dtype=float)
    cov_pred = np.asarray(cov_pred, dtype=float)
    d = model.D

    innovation_cov = d @ cov_pred @ d.T + model.R
    # K = M D^T S^-1, solved as (S^-1 D M)^T since S and M are symmetric.
    gain = scipy.linalg.solve(innovation_cov, d @ cov_pred, assume_a="pos").T

    innovation = np.asarray(observation, dtype=float) - d @ theta_pred
    theta = theta_pred + gain @ innovation
    cov = _symmetrize((np.eye(len(theta)) - gain @ d) @ cov_pred)
    return theta, cov


@dataclass(frozen=True)
class Association:
    """Result of associating old clusters with new ones.

    Attributes:
        pairs: (old cluster ID, new cluster index) of each associated pair.
        unmatched_old: IDs of old clusters without a partner.
        unmatched_new: Indices of new clusters without a partner.
    """

    pairs: tuple[tuple[int, int], ...]
    unmatched_old: tuple[int, ...]
    unmatched_new: tuple[int, ...]


def _log_closeness_table(
    candidates: list[ClusterParams],
    references: list[ClusterParams],
    eps: float,
) -> FloatArray:
    """Entry [i, j]: log closeness of candidates[i]'s centroid to references[j]."""
    centroids = np.array([c.centroid for c in candidates]).reshape(-1, 3)
    table = np.empty((len(candidates), len(references)))
    for j, ref in enumerate(references):
        table[:, j] = log_closeness(centroids, ref.centroid, ref.spread, eps)
    return table


def associate(
    old: list[ClusterParams],
    new: list[ClusterParams],
    eps: float,
) -> Association:
    """Associate clusters of consecutive snapshots by mutual closeness.

    For each new cluster the closest old cluster is the one whose Gaussian
    (old centroid, old spread) gives the new centroid the highest density;
    for each old cluster the closest new cluster is the one whose Gaussian
    (new centroid, new spread) gives the old centroid the highest density.
    Two clusters are associated when each is the other's closest.

    Args:
        old: Clusters of the previous snapshot, carrying their track IDs.
        new: Clusters of the current snapshot.
        eps: Spread regularization added before evaluating densities.

    Returns:
        Association holding the pairs and both unmatched lists.
    """
    if not old or not new:
        return Association(
            pairs=(),
            unmatched_old=tuple(c.cluster_id for c in old),
            unmatched_new=tuple(range(len(new))),
        )

    # Comparisons use log densities; the densities underflow for distant clusters.
    new_to_old = _log_closeness_table(new, old, eps)
    old_to_new = _log_closeness_table(old, new, eps)
    best_old = np.argmax(new_to_old, axis=1)
    best_new = np.argmax(old_to_new, axis=1)

    pairs = []
    matched_old: set[int] = set()
    matched_new: set[int] = set()
    for j, i in enumerate(best_new):
        if best_old[i] == j:
            pairs.append((old[j].cluster_id, int(i)))
            matched_old.add(j)
            matched_new.add(int(i))

    return Association(
        pairs=tuple(pairs),
        unmatched_old=tuple(
            c.cluster_id for j, c in enumerate(old) if j not in matched_old
        ),
        unmatched_new=tuple(i for i in range(len(new)) if i not in matched_new),
    )


@dataclass(frozen=True)
class TrackRegistry:
    """All tracks of a run.

    Attributes:
        active: Tracks associated at the latest snapshot, by ascending ID.
        retired: Tracks that lost association, in retirement order.
        next_id: ID given to the next new track.
    """

    active: tuple[TrackState, ...] = ()
    retired: tuple[TrackState, ...] = ()
    next_id: int = 0

    @property
    def all_tracks(self) -> tuple[TrackState, ...]:
        """Return retired and active tracks, ordered by ID."""
        return tuple(sorted(self.retired + self.active, key=lambda t: t.cluster_id))


@dataclass(frozen=True, eq=False)
class Prediction:
    """Predicted centroid of an active track for the next snapshot."""

    cluster_id: int
    position: FloatArray
    power: float


@dataclass(frozen=True, eq=False)
class StepResult:
    """Outcome of one tracking step.

    Attributes:
        registry: The registry after the step.
        clustering: The input clustering relabelled with track IDs.
        predictions: Next-snapshot predictions of all active tracks.
        association: Association performed in this step.
    """

    registry: TrackRegistry
    clustering: Clustering
    predictions: tuple[Prediction, ...]
    association: Association


def step_registry(
    registry: TrackRegistry,
    clustering: Clustering,
    model: KalmanModel,
    snapshot_index: int,
    eps: float = 1e-6,
) -> StepResult:
    """Advance all tracks by one snapshot.

    Associated tracks are Kalman-updated with their new centroid and keep
    their ID. Unassociated old tracks are retired. Unassociated new clusters
    start tracks at rest with fresh IDs.

    Args:
        registry: Registry after the previous snapshot.
        clustering: Clustering of the current snapshot.
        model: Kalman model.
        snapshot_index: Index of the current snapshot.
        eps: Spread regularization for the closeness function.

    Returns:
        StepResult with the new registry, relabelled clustering and
        predictions for seeding the next snapshot.
    """
    old_clusters = [track.last_cluster for track in registry.active]
    new_clusters = list(clustering.clusters)
    association = associate(old_clusters, new_clusters, eps)

    by_id = {track.cluster_id: track for track in registry.active}
    labels = [-1] * len(new_clusters)
    active: list[TrackState] = []

    for old_id, new_index in association.pairs:
        track = by_id[old_id]
        theta_pred, cov_pred = predict(track, model)
        cluster = new_clusters[new_index]
        theta, cov = update(theta_pred, cov_pred, cluster.centroid, model)
        active.append(track.observed(theta, cov, cluster, snapshot_index))
        labels[new_index] = old_id

    retired = registry.retired + tuple(by_id[i] for i in association.unmatched_old)

    next_id = registry.next_id
    for new_index in association.unmatched_new:
        cluster = new_clusters[new_index]
        born = TrackState(
            cluster_id=next_id,
            theta=model.initial_state(cluster.centroid),
            cov=model.initial_cov.copy(),
            born_at=snapshot_index,
            last_seen=snapshot_index,
            last_cluster=cluster,
        )
        active.append(born.observed(born.theta, born.cov, cluster, snapshot_index))
        labels[new_index] = next_id
        next_id += 1

    active.sort(key=lambda t: t.cluster_id)
    predictions = tuple(
        Prediction(
            cluster_id=track.cluster_id,
            position=model.predicted_position(track.theta),
            power=track.power,
        )
        for track in active
    )

    return StepResult(
        registry=TrackRegistry(active=tuple(active), retired=retired, next_id=next_id),
        clustering=clustering.relabel(labels),
        predictions=predictions,
        association=association,
    )
