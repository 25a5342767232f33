"""Core clustering, tracking and statistics logic for MPC Cluster Tracker."""

from .geometry import (
    AxisRanges,
    axis_ranges,
    closeness,
    mcd,
    spread_matrix,
    weighted_centroid,
    weighted_distance_matrix,
)
from .initseed import Provenance, SeedSet, seed_from_prediction, seed_from_scratch
from .kpower import assign, cluster_snapshot, prune_noise, update_centroids
from .tracker import (
    Association,
    KalmanModel,
    TrackRegistry,
    associate,
    predict,
    step_registry,
    update,
)
from .synth import ClusterSpec, LabeledSnapshot, ScenarioSpec, ScoreReport, generate, score
from .stats import (
    RunSummary,
    centroid_trajectories,
    clusters_per_snapshot,
    histogram,
    lifetimes,
    power_fractions,
    summarize,
)
from .pipeline import ClusterTrackingPipeline, RunRecord, run_pipeline, score_run
from .ingest import ingest_snapshots, read_truth, write_snapshots, write_truth
from .emitter import RunArtifacts, emit

__all__ = [
    "AxisRanges",
    "axis_ranges",
    "closeness",
    "mcd",
    "spread_matrix",
    "weighted_centroid",
    "weighted_distance_matrix",
    "Provenance",
    "SeedSet",
    "seed_from_prediction",
    "seed_from_scratch",
    "assign",
    "cluster_snapshot",
    "prune_noise",
    "update_centroids",
    "Association",
    "KalmanModel",
    "TrackRegistry",
    "associate",
    "predict",
    "step_registry",
    "update",
    "ClusterSpec",
    "LabeledSnapshot",
    "ScenarioSpec",
    "ScoreReport",
    "generate",
    "score",
    "RunSummary",
    "centroid_trajectories",
    "clusters_per_snapshot",
    "histogram",
    "lifetimes",
    "power_fractions",
    "summarize",
    "ClusterTrackingPipeline",
    "RunRecord",
    "run_pipeline",
    "score_run",
    "ingest_snapshots",
    "read_truth",
    "write_snapshots",
    "write_truth",
    "RunArtifacts",
    "emit",
]
