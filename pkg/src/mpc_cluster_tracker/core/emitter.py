"""Run artifact serialization."""

import hashlib
import json
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from .. import __version__
from ..exceptions import ArtifactWriteError
from .pipeline import RunRecord
from .stats import histogram, snapshot_power_fractions

FLOAT_FORMAT = "%.9g"

CLUSTER_COLUMNS = [
    "snapshot", "cluster_id", "power", "size", "x", "y", "z",
    "c_xx", "c_xy", "c_xz", "c_yy", "c_yz", "c_zz",
]
TRACK_COLUMNS = ["snapshot", "cluster_id", "x", "dx", "y", "dy", "z", "dz"]
ASSIGNMENT_COLUMNS = ["snapshot", "path_id", "cluster_id"]
LIFETIME_COLUMNS = ["cluster_id", "born_at", "last_seen", "lifetime", "active"]
COUNT_COLUMNS = ["snapshot", "n_clusters"]
FRACTION_COLUMNS = ["snapshot", "cluster_id", "power_percent"]
HISTOGRAM_COLUMNS = ["bin_start", "bin_end", "count"]

_UPPER_TRIANGLE = np.triu_indices(3)


@dataclass(frozen=True)
class RunArtifacts:
    """Paths of the files written for one run."""

    clusters: Path
    tracks: Path
    assignments: Path
    lifetimes: Path
    clusters_per_snapshot: Path
    power_fractions: Path
    run_meta: Path


def file_digest(path: Path | str) -> str:
    """Return the SHA-256 hex digest of a file."""
    with open(path, "rb") as f:
        return hashlib.file_digest(f, "sha256").hexdigest()


def _write_csv(rows: list[tuple], columns: list[str], path: Path) -> Path:
    pd.DataFrame.from_records(rows, columns=columns).to_csv(
        path, index=False, float_format=FLOAT_FORMAT
    )
    return path


def _cluster_rows(run: RunRecord) -> list[tuple]:
    rows = []
    for result in run.snapshots:
        for cluster in result.clustering.clusters:
            rows.append((
                result.index,
                cluster.cluster_id,
                cluster.power,
                cluster.size,
                *cluster.centroid,
                *cluster.spread[_UPPER_TRIANGLE],
            ))
    return rows


def _track_rows(run: RunRecord) -> list[tuple]:
    return [
        (result.index, track.cluster_id, *track.theta)
        for result in run.snapshots
        for track in result.tracks
    ]


def _assignment_rows(run: RunRecord) -> list[tuple]:
    rows = []
    for result in run.snapshots:
        clustering = result.clustering
        ids = [cluster.cluster_id for cluster in clustering.clusters]
        order = np.argsort(clustering.path_ids, kind="stable")
        for i in order:
            rows.append((
                result.index,
                int(clustering.path_ids[i]),
                ids[int(clustering.assignment[i])],
            ))
    return rows


def _lifetime_rows(run: RunRecord) -> list[tuple]:
    active = {track.cluster_id for track in run.registry.active}
    return [
        (t.cluster_id, t.born_at, t.last_seen, t.lifetime, t.cluster_id in active)
        for t in run.registry.all_tracks
    ]


def _fraction_rows(run: RunRecord) -> list[tuple]:
    rows = []
    for result in run.snapshots:
        fractions = snapshot_power_fractions(result.clustering)
        for cluster, fraction in zip(result.clustering.clusters, fractions):
            rows.append((result.index, cluster.cluster_id, fraction))
    return rows


def emit(
    run: RunRecord,
    out_dir: Path | str,
    input_digest: str | None = None,
    extra_meta: dict[str, Any] | None = None,
) -> RunArtifacts:
    """Write all artifacts of a run.

    Args:
        run: The completed run.
        out_dir: Output directory, created if missing.
        input_digest: Digest of the input file, echoed in run_meta.
        extra_meta: Further entries for run_meta.

    Returns:
        RunArtifacts with the written paths.

    Raises:
        ArtifactWriteError: If a file cannot be written.
    """
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        artifacts = RunArtifacts(
            clusters=_write_csv(_cluster_rows(run), CLUSTER_COLUMNS, out / "clusters.csv"),
            tracks=_write_csv(_track_rows(run), TRACK_COLUMNS, out / "tracks.csv"),
            assignments=_write_csv(
                _assignment_rows(run), ASSIGNMENT_COLUMNS, out / "assignments.csv"
            ),
            lifetimes=_write_csv(_lifetime_rows(run), LIFETIME_COLUMNS, out / "lifetimes.csv"),
            clusters_per_snapshot=_write_csv(
                [(r.index, r.clustering.cluster_count) for r in run.snapshots],
                COUNT_COLUMNS,
                out / "clusters_per_snapshot.csv",
            ),
            power_fractions=_write_csv(
                _fraction_rows(run), FRACTION_COLUMNS, out / "power_fractions.csv"
            ),
            run_meta=out / "run_meta.json",
        )
        meta = {
            "version": __version__,
            "created": datetime.now(timezone.utc).isoformat(),
            "config": run.config.to_dict(),
            "input_digest": input_digest,
            "snapshots": len(run.snapshots),
            "tracks": len(run.registry.all_tracks),
            **(extra_meta or {}),
        }
        artifacts.run_meta.write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
    except OSError as e:
        raise ArtifactWriteError(f"Could not write artifacts to {out}: {e}") from e
    return artifacts


def emit_histogram(values: Any, bin_width: float, path: Path | str) -> Path:
    """Write a histogram of values as CSV.

    An empty value set writes a header-only file.

    Raises:
        ArtifactWriteError: If the file cannot be written.
    """
    rows: list[tuple] = []
    if len(values):
        edges, counts = histogram(values, bin_width)
        rows = list(zip(edges[:-1], edges[1:], counts.tolist()))
    try:
        return _write_csv(rows, HISTOGRAM_COLUMNS, Path(path))
    except OSError as e:
        raise ArtifactWriteError(f"Could not write {path}: {e}") from e
