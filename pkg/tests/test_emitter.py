"""Unit tests for run artifact output."""

import json

import pandas as pd
import pytest

from src.mpc_cluster_tracker.core.emitter import (
    CLUSTER_COLUMNS,
    LIFETIME_COLUMNS,
    TRACK_COLUMNS,
    emit,
    emit_histogram,
    file_digest,
)
from src.mpc_cluster_tracker.core.pipeline import RunRecord, run_pipeline
from src.mpc_cluster_tracker.core.synth import ClusterSpec, ScenarioSpec, generate
from src.mpc_cluster_tracker.core.tracker import TrackRegistry
from src.mpc_cluster_tracker.exceptions import ArtifactWriteError
from src.mpc_cluster_tracker.models import PipelineConfig


def small_run() -> RunRecord:
    """Track two clusters over six snapshots."""
    scenario = ScenarioSpec(
        n_snapshots=6,
        clusters=(
            ClusterSpec(0, 5, (0, 0, 0), spread_std=(0.3, 0.3, 0.3), n_mpcs=8),
            ClusterSpec(0, 5, (20, 20, 20), spread_std=(0.3, 0.3, 0.3), n_mpcs=8),
        ),
        rng_seed=2,
    )
    snapshots = [item.snapshot for item in generate(scenario)]
    return run_pipeline(snapshots, PipelineConfig(k_max=2))


class TestEmit:
    """Tests for emit function."""

    def test_empty_run_writes_headers(self, tmp_path):
        """An empty run produces header-only tables."""
        run = RunRecord(snapshots=(), registry=TrackRegistry(), config=PipelineConfig())
        artifacts = emit(run, tmp_path)
        clusters = pd.read_csv(artifacts.clusters)
        assert list(clusters.columns) == CLUSTER_COLUMNS
        assert clusters.empty
        assert list(pd.read_csv(artifacts.tracks).columns) == TRACK_COLUMNS
        assert list(pd.read_csv(artifacts.lifetimes).columns) == LIFETIME_COLUMNS

    def test_one_row_per_cluster(self, tmp_path):
        """clusters.csv has one row per cluster per snapshot."""
        run = small_run()
        artifacts = emit(run, tmp_path)
        clusters = pd.read_csv(artifacts.clusters)
        assert len(clusters) == sum(r.clustering.cluster_count for r in run.snapshots)
        tracks = pd.read_csv(artifacts.tracks)
        assert len(tracks) == sum(len(r.tracks) for r in run.snapshots)
        assignments = pd.read_csv(artifacts.assignments)
        assert len(assignments) == sum(r.retained_count for r in run.snapshots)

    def test_lifetimes_table(self, tmp_path):
        """lifetimes.csv lists every track with its span."""
        run = small_run()
        lifetimes = pd.read_csv(emit(run, tmp_path).lifetimes)
        assert len(lifetimes) == len(run.registry.all_tracks)
        assert (lifetimes["lifetime"] == lifetimes["last_seen"] - lifetimes["born_at"] + 1).all()

    def test_power_fractions_sum(self, tmp_path):
        """Each snapshot's power fractions sum to 100."""
        fractions = pd.read_csv(emit(small_run(), tmp_path).power_fractions)
        sums = fractions.groupby("snapshot")["power_percent"].sum()
        assert sums.to_numpy() == pytest.approx(100.0, rel=1e-6)

    def test_run_meta(self, tmp_path):
        """run_meta.json records the config and the input digest."""
        artifacts = emit(small_run(), tmp_path, input_digest="abc123")
        meta = json.loads(artifacts.run_meta.read_text(encoding="utf-8"))
        assert meta["input_digest"] == "abc123"
        assert meta["config"]["k_max"] == 2
        assert meta["snapshots"] == 6

    def test_deterministic_output(self, tmp_path):
        """Identical runs write byte-identical tables."""
        first = emit(small_run(), tmp_path / "a")
        second = emit(small_run(), tmp_path / "b")
        for name in ("clusters", "tracks", "assignments", "lifetimes"):
            assert getattr(first, name).read_bytes() == getattr(second, name).read_bytes()

    def test_unwritable_directory(self, tmp_path):
        """A file in place of the output directory raises ArtifactWriteError."""
        blocker = tmp_path / "blocked"
        blocker.write_text("x", encoding="utf-8")
        run = RunRecord(snapshots=(), registry=TrackRegistry(), config=PipelineConfig())
        with pytest.raises(ArtifactWriteError):
            emit(run, blocker)


class TestEmitHistogram:
    """Tests for emit_histogram and file_digest."""

    def test_histogram_rows(self, tmp_path):
        """One row per bin with its count."""
        path = emit_histogram([1, 1, 2], 1, tmp_path / "h.csv")
        table = pd.read_csv(path)
        assert table["count"].tolist() == [2, 1]
        assert table["bin_start"].tolist() == [1, 2]

    def test_empty_histogram(self, tmp_path):
        """No values write a header-only file."""
        table = pd.read_csv(emit_histogram([], 1, tmp_path / "h.csv"))
        assert table.empty

    def test_file_digest(self, tmp_path):
        """Digest is the SHA-256 of the file content."""
        path = tmp_path / "f.txt"
        path.write_bytes(b"")
        assert file_digest(path) == (
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        )
