"""Clustering-and-tracking pipeline orchestration."""

from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np

from ..exceptions import IterationLimitExceeded, MpcClusterTrackerError, NonMonotonicSnapshots
from ..models import Clustering, McdNormalization, PipelineConfig, Snapshot, TrackState
from ..utils import select_side, validate_snapshot
from .geometry import AxisRanges, axis_ranges
from .initseed import SeedSet, seed_from_prediction, seed_from_scratch
from .kpower import cluster_snapshot, prune_noise
from .synth import LabeledSnapshot, ScoreReport, score
from .tracker import KalmanModel, Prediction, TrackRegistry, step_registry


@dataclass(frozen=True, eq=False)
class SnapshotResult:
    """Pipeline output for one snapshot.

    Attributes:
        index: Snapshot index.
        clustering: Final clustering, clusters labelled with track IDs.
        tracks: Active tracks after this snapshot.
        seeds: Initial-guess centroids used.
        mpc_count: Number of MPCs in the snapshot.
        snapshot_power: Total linear power of the snapshot.
    """

    index: int
    clustering: Clustering
    tracks: tuple[TrackState, ...]
    seeds: SeedSet
    mpc_count: int
    snapshot_power: float

    @property
    def retained_count(self) -> int:
        """Return the number of MPCs kept after noise pruning."""
        return len(self.clustering.path_ids)


@dataclass(frozen=True, eq=False)
class RunRecord:
    """Complete output of a pipeline run.

    Attributes:
        snapshots: Per-snapshot results in processing order.
        registry: Track registry after the final snapshot.
        config: Configuration the run used.
    """

    snapshots: tuple[SnapshotResult, ...]
    registry: TrackRegistry
    config: PipelineConfig

    @property
    def clusterings(self) -> list[Clustering]:
        """Return the final clustering of every snapshot."""
        return [result.clustering for result in self.snapshots]


class ClusterTrackingPipeline:
    """Clusters every snapshot and tracks the clusters across snapshots."""

    def __init__(
        self,
        config: PipelineConfig | None = None,
        progress_callback: Callable[[str, float, str], None] | None = None,
        log_callback: Callable[[str], None] | None = None,
    ):
        """Initialize the pipeline.

        Args:
            config: Pipeline configuration; defaults are used if None.
            progress_callback: Callback for progress (stage, percent, message).
            log_callback: Callback for log messages.
        """
        self._config = config or PipelineConfig()
        self._model = KalmanModel.from_config(self._config)
        self._progress_callback = progress_callback
        self._log_callback = log_callback
        self._cancelled = False
        self._last_percent = 0.0

    @property
    def config(self) -> PipelineConfig:
        """Return the pipeline configuration."""
        return self._config

    def _log(self, message: str) -> None:
        """Emit a log message."""
        if self._log_callback:
            self._log_callback(message)

    def _emit_progress(self, stage: str, percent: float, message: str) -> None:
        """Emit progress update."""
        if self._progress_callback:
            self._progress_callback(stage, percent, message)

    def cancel(self) -> None:
        """Request cancellation before the next snapshot."""
        self._cancelled = True

    def execute(self, snapshots: Sequence[Snapshot]) -> RunRecord:
        """Run clustering and tracking over a snapshot sequence.

        Args:
            snapshots: Snapshots in strictly increasing index order.

        Returns:
            RunRecord with per-snapshot results and the final registry.
            A cancelled run holds the snapshots processed so far.

        Raises:
            NonMonotonicSnapshots: If indices do not strictly increase.
            ValidationError: If a snapshot violates an MPC invariant.
        """
        self._cancelled = False
        self._last_percent = 0.0
        cfg = self._config

        self._check_order(snapshots)
        global_ranges = self._global_ranges(snapshots)

        registry = TrackRegistry()
        predictions: tuple[Prediction, ...] = ()
        results: list[SnapshotResult] = []
        total = len(snapshots)

        self._emit_progress("clustering", 0, f"Processing {total} snapshots...")
        self._log(
            f"Clustering {cfg.side.value.upper()}-side coordinates, k_max={cfg.k_max}"
        )

        for position, snapshot in enumerate(snapshots, 1):
            if self._cancelled:
                self._log(f"Cancelled after {len(results)} snapshots")
                break
            try:
                result, registry, predictions = self._process(
                    snapshot, registry, predictions, global_ranges
                )
            except MpcClusterTrackerError as e:
                e.add_note(f"while processing snapshot {snapshot.index}")
                raise
            results.append(result)
            self._on_snapshot_done(position, total, result)

        self._emit_progress("complete", 100, "Complete!")
        self._log(
            f"Processed {len(results)} snapshots, "
            f"{len(registry.active) + len(registry.retired)} tracks"
        )
        return RunRecord(snapshots=tuple(results), registry=registry, config=cfg)

    def _check_order(self, snapshots: Sequence[Snapshot]) -> None:
        """Verify snapshot indices strictly increase."""
        for previous, current in zip(snapshots, snapshots[1:]):
            if current.index <= previous.index:
                raise NonMonotonicSnapshots(
                    f"Snapshot {current.index} follows snapshot {previous.index}"
                )

    def _global_ranges(self, snapshots: Sequence[Snapshot]) -> AxisRanges | None:
        """Axis ranges over every snapshot, if global normalization is set."""
        if self._config.mcd_normalization is not McdNormalization.GLOBAL or not snapshots:
            return None
        points = np.vstack([select_side(s, self._config.side) for s in snapshots if s.mpcs])
        return axis_ranges(points)

    def _process(
        self,
        snapshot: Snapshot,
        registry: TrackRegistry,
        predictions: tuple[Prediction, ...],
        global_ranges: AxisRanges | None,
    ) -> tuple[SnapshotResult, TrackRegistry, tuple[Prediction, ...]]:
        """Cluster one snapshot and advance the tracks."""
        cfg = self._config
        validate_snapshot(snapshot)

        points = select_side(snapshot, cfg.side)
        powers = snapshot.powers
        path_ids = snapshot.path_ids
        ranges = global_ranges or axis_ranges(points)

        retained = prune_noise(points, powers, cfg)
        kept_points, kept_powers = points[retained], powers[retained]

        if predictions:
            seeds = seed_from_prediction(
                [p.position for p in predictions],
                kept_points,
                kept_powers,
                ranges,
                cfg,
                track_powers=[p.power for p in predictions],
            )
        else:
            seeds = seed_from_scratch(kept_points, kept_powers, ranges, cfg)

        try:
            clustering = cluster_snapshot(
                kept_points, kept_powers, seeds, ranges, cfg, path_ids=path_ids[retained]
            )
        except IterationLimitExceeded as e:
            self._log(f"Warning: snapshot {snapshot.index}: {e}; using last iterate")
            clustering = e.clustering

        step = step_registry(
            registry,
            clustering,
            self._model,
            snapshot.index,
            eps=cfg.spread_regularization_eps,
        )

        result = SnapshotResult(
            index=snapshot.index,
            clustering=step.clustering,
            tracks=step.registry.active,
            seeds=seeds,
            mpc_count=snapshot.mpc_count,
            snapshot_power=float(powers.sum()),
        )
        return result, step.registry, step.predictions

    def _on_snapshot_done(self, position: int, total: int, result: SnapshotResult) -> None:
        """Report a finished snapshot."""
        self._log(
            f"Snapshot {result.index}: {result.mpc_count} MPCs, "
            f"{result.retained_count} kept, "
            f"{result.clustering.cluster_count} clusters"
        )
        percent = position / total * 100
        if percent - self._last_percent >= 1 or position == total:
            self._last_percent = percent
            self._emit_progress(
                "clustering", percent, f"Snapshot {position}/{total}"
            )


def run_pipeline(
    snapshots: Sequence[Snapshot],
    cfg: PipelineConfig | None = None,
    log_callback: Callable[[str], None] | None = None,
) -> RunRecord:
    """Run the clustering-and-tracking pipeline.

    Args:
        snapshots: Snapshots in strictly increasing index order.
        cfg: Pipeline configuration; defaults are used if None.
        log_callback: Callback for log messages.

    Returns:
        RunRecord of the run.
    """
    if not snapshots:
        raise ValueError("run_pipeline needs at least one snapshot")
    return ClusterTrackingPipeline(cfg, log_callback=log_callback).execute(snapshots)


def found_assignments(run: RunRecord) -> list[dict[int, int]]:
    """Per snapshot, mapping from retained path ID to track ID."""
    mappings = []
    for result in run.snapshots:
        clustering = result.clustering
        ids = [cluster.cluster_id for cluster in clustering.clusters]
        mappings.append(
            {
                int(pid): ids[int(label)]
                for pid, label in zip(clustering.path_ids, clustering.assignment)
            }
        )
    return mappings


def score_run(run: RunRecord, truth: Sequence[LabeledSnapshot]) -> ScoreReport:
    """Score a pipeline run against synthetic ground truth."""
    track_lifetimes = {t.cluster_id: t.lifetime for t in run.registry.all_tracks}
    return score(found_assignments(run), truth, track_lifetimes)
