"""Data models for MPC Cluster Tracker."""

from .mpc import Mpc, Snapshot, Vector3
from .cluster import ClusterParams, Clustering
from .track import TrackState, TrajectoryPoint
from .config import McdNormalization, PipelineConfig, Side

__all__ = [
    "Mpc",
    "Snapshot",
    "Vector3",
    "ClusterParams",
    "Clustering",
    "TrackState",
    "TrajectoryPoint",
    "McdNormalization",
    "PipelineConfig",
    "Side",
]
