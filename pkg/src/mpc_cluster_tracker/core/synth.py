"""Synthetic dynamic-cluster scenarios with ground-truth labels."""

from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import numpy.typing as npt
from scipy.optimize import linear_sum_assignment

from ..exceptions import DimensionMismatch, InvalidSpec, TooManyClustersForExactMatching
from ..models import Mpc, Snapshot, Vector3
from ..utils import db_to_linear

NOISE_LABEL = -1
NOISE_POWER_OFFSET_DB = 20.0
MAX_EXACT_MATCH_CLUSTERS = 8


def _vector3(value: Any, name: str) -> Vector3:
    try:
        x, y, z = (float(v) for v in value)
    except (TypeError, ValueError) as e:
        raise InvalidSpec(f"{name} must be three numbers") from e
    return (x, y, z)


@dataclass(frozen=True)
class ClusterSpec:
    """One synthetic cluster.

    Attributes:
        birth: First snapshot in which the cluster exists.
        death: Last snapshot in which the cluster exists.
        initial_centroid: Centroid at birth, metres.
        velocity: Centroid displacement per snapshot, metres.
        spread_std: Per-axis standard deviation of MPC scatter, metres.
        n_mpcs: MPCs drawn per snapshot.
        power_db_mean: Mean MPC power, dB.
        power_db_std: Standard deviation of MPC power, dB.
        bs_offset: BS-side coordinate minus MS-side coordinate per MPC.
    """

    birth: int
    death: int
    initial_centroid: Vector3
    velocity: Vector3 = (0.0, 0.0, 0.0)
    spread_std: Vector3 = (1.0, 1.0, 1.0)
    n_mpcs: int = 20
    power_db_mean: float = 0.0
    power_db_std: float = 3.0
    bs_offset: Vector3 = (0.0, 0.0, 0.0)

    def centroid_at(self, snapshot: int) -> npt.NDArray[np.float64]:
        """Return the true centroid at a snapshot."""
        return np.asarray(self.initial_centroid) + np.asarray(self.velocity) * (
            snapshot - self.birth
        )

    def is_alive(self, snapshot: int) -> bool:
        """Return True if the cluster exists at the snapshot."""
        return self.birth <= snapshot <= self.death

    @property
    def lifetime(self) -> int:
        """Return the number of snapshots the cluster exists."""
        return self.death - self.birth + 1

    @classmethod
    def from_dict(cls, values: dict[str, Any]) -> "ClusterSpec":
        """Build a cluster spec from a config mapping."""
        values = dict(values)
        for key in ("initial_centroid", "velocity", "spread_std", "bs_offset"):
            if key in values:
                values[key] = _vector3(values[key], key)
        try:
            return cls(**values)
        except TypeError as e:
            raise InvalidSpec(f"Invalid cluster description: {e}") from e


@dataclass(frozen=True)
class ScenarioSpec:
    """A synthetic scenario of moving, appearing and vanishing clusters.

    Attributes:
        n_snapshots: Number of snapshots to generate.
        clusters: Cluster descriptions; the label of a cluster is its index.
        noise_mpcs_per_snapshot: Uniform noise MPCs added to every snapshot.
        rng_seed: Seed of the random generator.
    """

    n_snapshots: int
    clusters: tuple[ClusterSpec, ...] = field(default_factory=tuple)
    noise_mpcs_per_snapshot: int = 0
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if self.n_snapshots < 1:
            raise InvalidSpec("n_snapshots must be at least 1")
        if self.noise_mpcs_per_snapshot < 0:
            raise InvalidSpec("noise_mpcs_per_snapshot must not be negative")
        for label, cluster in enumerate(self.clusters):
            if not 0 <= cluster.birth <= cluster.death < self.n_snapshots:
                raise InvalidSpec(
                    f"Cluster {label}: need 0 <= birth <= death < n_snapshots"
                )
            if cluster.n_mpcs < 1:
                raise InvalidSpec(f"Cluster {label}: n_mpcs must be at least 1")
            if min(cluster.spread_std) < 0 or cluster.power_db_std < 0:
                raise InvalidSpec(f"Cluster {label}: deviations must not be negative")

    @classmethod
    def from_dict(cls, values: dict[str, Any]) -> "ScenarioSpec":
        """Build a scenario from a config mapping.

        Raises:
            InvalidSpec: If the mapping does not describe a valid scenario.
        """
        values = dict(values)
        clusters = tuple(ClusterSpec.from_dict(c) for c in values.pop("clusters", ()))
        try:
            return cls(clusters=clusters, **values)
        except TypeError as e:
            raise InvalidSpec(f"Invalid scenario description: {e}") from e

    def noise_power_db(self) -> float:
        """Return the power of noise MPCs, 20 dB under the mean cluster power."""
        if not self.clusters:
            return -NOISE_POWER_OFFSET_DB
        mean = float(np.mean([c.power_db_mean for c in self.clusters]))
        return mean - NOISE_POWER_OFFSET_DB

    def scene_bounds(self) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
        """Return the (low, high) corners of the box holding all clusters."""
        if not self.clusters:
            return np.zeros(3), np.ones(3)
        corners = []
        for cluster in self.clusters:
            pad = 3.0 * np.asarray(cluster.spread_std)
            for n in (cluster.birth, cluster.death):
                c = cluster.centroid_at(n)
                corners.extend([c - pad, c + pad])
        stacked = np.array(corners)
        low, high = stacked.min(axis=0), stacked.max(axis=0)
        # Keep every axis at least one metre wide.
        short = high - low < 1.0
        high = np.where(short, low + 1.0, high)
        return low, high


@dataclass(frozen=True, eq=False)
class LabeledSnapshot:
    """A generated snapshot with the true cluster label of every MPC.

    Attributes:
        snapshot: The generated snapshot.
        truth: Label per MPC, a cluster index or NOISE_LABEL.
    """

    snapshot: Snapshot
    truth: npt.NDArray[np.int64]

    def label_of(self) -> dict[int, int]:
        """Return a mapping from path ID to true label."""
        return {
            mpc.path_id: int(label) for mpc, label in zip(self.snapshot.mpcs, self.truth)
        }


def generate(spec: ScenarioSpec) -> list[LabeledSnapshot]:
    """Generate all snapshots of a scenario.

    Cluster MPC positions are normal around the moving centroid, powers
    lognormal; noise MPCs are uniform over the scene box. Output depends
    only on the spec.

    Args:
        spec: Scenario description.

    Returns:
        One LabeledSnapshot per snapshot index.

    Raises:
        InvalidSpec: If a snapshot would contain no MPCs.
    """
    rng = np.random.default_rng(spec.rng_seed)
    low, high = spec.scene_bounds()
    noise_power_db = spec.noise_power_db()
    result: list[LabeledSnapshot] = []

    for n in range(spec.n_snapshots):
        positions: list[npt.NDArray[np.float64]] = []
        offsets: list[npt.NDArray[np.float64]] = []
        powers_db: list[npt.NDArray[np.float64]] = []
        labels: list[npt.NDArray[np.int64]] = []

        for label, cluster in enumerate(spec.clusters):
            if not cluster.is_alive(n):
                continue
            pos = rng.normal(
                loc=cluster.centroid_at(n),
                scale=np.asarray(cluster.spread_std),
                size=(cluster.n_mpcs, 3),
            )
            positions.append(pos)
            offsets.append(np.tile(np.asarray(cluster.bs_offset), (cluster.n_mpcs, 1)))
            powers_db.append(
                rng.normal(cluster.power_db_mean, cluster.power_db_std, cluster.n_mpcs)
            )
            labels.append(np.full(cluster.n_mpcs, label, dtype=np.int64))

        if spec.noise_mpcs_per_snapshot:
            count = spec.noise_mpcs_per_snapshot
            pos = rng.uniform(low, high, size=(count, 3))
            positions.append(pos)
            offsets.append(np.zeros((count, 3)))
            powers_db.append(np.full(count, noise_power_db))
            labels.append(np.full(count, NOISE_LABEL, dtype=np.int64))

        if not positions:
            raise InvalidSpec(f"Snapshot {n} would contain no MPCs")

        ms = np.vstack(positions)
        bs = ms + np.vstack(offsets)
        power = db_to_linear(np.concatenate(powers_db))
        mpcs = tuple(
            Mpc(
                path_id=i,
                ms_pos=(float(ms[i, 0]), float(ms[i, 1]), float(ms[i, 2])),
                bs_pos=(float(bs[i, 0]), float(bs[i, 1]), float(bs[i, 2])),
                power=float(power[i]),
            )
            for i in range(len(ms))
        )
        result.append(
            LabeledSnapshot(snapshot=Snapshot(index=n, mpcs=mpcs), truth=np.concatenate(labels))
        )

    return result


@dataclass(frozen=True)
class ScoreReport:
    """Agreement between a tracking run and the ground truth.

    Attributes:
        accuracy: Matched-power fraction per snapshot.
        id_continuity: Fraction of true-cluster persistences across
            consecutive snapshots whose matched track ID also persisted.
        lifetime_error: Mean |found - true| lifetime over matched clusters.
    """

    accuracy: tuple[float, ...]
    id_continuity: float
    lifetime_error: float

    @property
    def mean_accuracy(self) -> float:
        """Return the mean per-snapshot accuracy."""
        return float(np.mean(self.accuracy)) if self.accuracy else 1.0

    def to_dict(self) -> dict[str, Any]:
        """Return a JSON-serializable summary."""
        return {
            "mean_accuracy": self.mean_accuracy,
            "min_accuracy": min(self.accuracy, default=1.0),
            "id_continuity": self.id_continuity,
            "lifetime_error": self.lifetime_error,
            "snapshots": len(self.accuracy),
        }


def match_snapshot(
    found: dict[int, int],
    truth: LabeledSnapshot,
) -> tuple[float, dict[int, int]]:
    """Best one-to-one matching of found clusters to true clusters.

    Args:
        found: Mapping from path ID to found cluster ID. Paths missing from
            the mapping were not clustered.
        truth: The labelled snapshot.

    Returns:
        Tuple of (matched-power fraction, true label -> found ID).

    Raises:
        TooManyClustersForExactMatching: If both sides have more than
            eight clusters.
    """
    power_of = {mpc.path_id: mpc.power for mpc in truth.snapshot.mpcs}
    true_of = truth.label_of()
    true_labels = sorted({lab for lab in true_of.values() if lab != NOISE_LABEL})
    found_ids = sorted(set(found.values()))
    true_power = sum(power_of[pid] for pid, lab in true_of.items() if lab != NOISE_LABEL)

    if not true_labels or not found_ids:
        return (1.0 if not true_labels else 0.0), {}
    if min(len(true_labels), len(found_ids)) > MAX_EXACT_MATCH_CLUSTERS:
        raise TooManyClustersForExactMatching(
            f"Snapshot {truth.snapshot.index}: exact matching is limited to "
            f"{MAX_EXACT_MATCH_CLUSTERS} clusters"
        )

    shared = np.zeros((len(true_labels), len(found_ids)))
    t_index = {lab: i for i, lab in enumerate(true_labels)}
    f_index = {fid: j for j, fid in enumerate(found_ids)}
    for pid, fid in found.items():
        lab = true_of.get(pid, NOISE_LABEL)
        if lab != NOISE_LABEL:
            shared[t_index[lab], f_index[fid]] += power_of[pid]

    rows, cols = linear_sum_assignment(shared, maximize=True)
    matched = float(shared[rows, cols].sum())
    mapping = {
        true_labels[r]: found_ids[c] for r, c in zip(rows, cols) if shared[r, c] > 0
    }
    return matched / true_power, mapping


def score(
    found: Sequence[dict[int, int]],
    truth: Sequence[LabeledSnapshot],
    found_lifetimes: dict[int, int],
) -> ScoreReport:
    """Score a tracking run against ground truth.

    Args:
        found: Per snapshot, mapping from path ID to track ID.
        truth: Labelled snapshots, in the same order.
        found_lifetimes: Lifetime of every track ID in the run.

    Returns:
        ScoreReport with accuracy, ID continuity and lifetime error.

    Raises:
        DimensionMismatch: If the snapshot counts differ.
        TooManyClustersForExactMatching: If a snapshot has too many clusters.
    """
    if len(found) != len(truth):
        raise DimensionMismatch(
            f"Run has {len(found)} snapshots but truth has {len(truth)}"
        )

    accuracy: list[float] = []
    matches: list[dict[int, int]] = []
    for assignment, labelled in zip(found, truth):
        acc, mapping = match_snapshot(assignment, labelled)
        accuracy.append(acc)
        matches.append(mapping)

    persisted = events = 0
    for n in range(1, len(truth)):
        alive_before = set(np.unique(truth[n - 1].truth)) - {NOISE_LABEL}
        alive_now = set(np.unique(truth[n].truth)) - {NOISE_LABEL}
        for lab in alive_before & alive_now:
            events += 1
            before = matches[n - 1].get(int(lab))
            if before is not None and before == matches[n].get(int(lab)):
                persisted += 1
    continuity = persisted / events if events else 1.0

    true_span: dict[int, list[int]] = {}
    matched_ids: dict[int, list[int]] = {}
    for labelled, mapping in zip(truth, matches):
        n = labelled.snapshot.index
        for lab in set(np.unique(labelled.truth)) - {NOISE_LABEL}:
            true_span.setdefault(int(lab), []).append(n)
        for lab, fid in mapping.items():
            matched_ids.setdefault(lab, []).append(fid)

    errors = []
    for lab, ids in matched_ids.items():
        values, counts = np.unique(ids, return_counts=True)
        track_id = int(values[np.argmax(counts)])
        true_lifetime = len(true_span[lab])
        errors.append(abs(found_lifetimes.get(track_id, 0) - true_lifetime))
    lifetime_error = float(np.mean(errors)) if errors else 0.0

    return ScoreReport(
        accuracy=tuple(accuracy),
        id_continuity=continuity,
        lifetime_error=lifetime_error,
    )
