"""Unit tests for synthetic scenarios and scoring."""

import numpy as np
import pytest

from src.mpc_cluster_tracker.core.synth import (
    NOISE_LABEL,
    ClusterSpec,
    LabeledSnapshot,
    ScenarioSpec,
    generate,
    match_snapshot,
    score,
)
from src.mpc_cluster_tracker.exceptions import (
    DimensionMismatch,
    InvalidSpec,
    TooManyClustersForExactMatching,
)
from src.mpc_cluster_tracker.models import Mpc, Snapshot


def labelled(index, powers, labels) -> LabeledSnapshot:
    """Create a labelled snapshot with path IDs 0..L-1."""
    mpcs = tuple(
        Mpc(path_id=i, ms_pos=(float(i), 0.0, 0.0), bs_pos=(float(i), 0.0, 0.0), power=p)
        for i, p in enumerate(powers)
    )
    return LabeledSnapshot(
        snapshot=Snapshot(index=index, mpcs=mpcs), truth=np.array(labels, dtype=np.int64)
    )


class TestClusterSpec:
    """Tests for ClusterSpec class."""

    def test_centroid_moves_linearly(self):
        """Centroid advances one velocity per snapshot from birth."""
        spec = ClusterSpec(birth=2, death=9, initial_centroid=(1, 0, 0), velocity=(0.5, 0, 1))
        np.testing.assert_allclose(spec.centroid_at(6), [3, 0, 4])

    def test_alive_window(self):
        """A cluster exists from birth through death inclusive."""
        spec = ClusterSpec(birth=10, death=40, initial_centroid=(0, 0, 0))
        assert not spec.is_alive(9)
        assert spec.is_alive(10)
        assert spec.is_alive(40)
        assert not spec.is_alive(41)
        assert spec.lifetime == 31

    def test_from_dict_bad_vector(self):
        """A malformed coordinate raises InvalidSpec."""
        with pytest.raises(InvalidSpec):
            ClusterSpec.from_dict({"birth": 0, "death": 1, "initial_centroid": [1, 2]})


class TestScenarioSpec:
    """Tests for ScenarioSpec validation."""

    def test_death_beyond_end(self):
        """Clusters must die before the last snapshot."""
        with pytest.raises(InvalidSpec):
            ScenarioSpec(
                n_snapshots=5,
                clusters=(ClusterSpec(birth=0, death=5, initial_centroid=(0, 0, 0)),),
            )

    def test_birth_after_death(self):
        """Birth after death is rejected."""
        with pytest.raises(InvalidSpec):
            ScenarioSpec(
                n_snapshots=5,
                clusters=(ClusterSpec(birth=3, death=2, initial_centroid=(0, 0, 0)),),
            )

    def test_no_snapshots(self):
        """A scenario needs at least one snapshot."""
        with pytest.raises(InvalidSpec):
            ScenarioSpec(n_snapshots=0)

    def test_unknown_key(self):
        """Unknown scenario keys raise InvalidSpec."""
        with pytest.raises(InvalidSpec):
            ScenarioSpec.from_dict({"n_snapshots": 3, "colour": "red"})


class TestGenerate:
    """Tests for generate function."""

    def test_zero_spread_and_power_variance(self):
        """Zero deviations put every MPC on the centroid at the mean power."""
        spec = ScenarioSpec(
            n_snapshots=3,
            clusters=(
                ClusterSpec(
                    birth=0,
                    death=2,
                    initial_centroid=(1, 2, 3),
                    velocity=(1, 0, 0),
                    spread_std=(0, 0, 0),
                    n_mpcs=5,
                    power_db_std=0.0,
                ),
            ),
        )
        result = generate(spec)
        assert len(result) == 3
        for n, item in enumerate(result):
            assert item.snapshot.index == n
            for mpc in item.snapshot.mpcs:
                assert mpc.ms_pos == pytest.approx((1 + n, 2, 3))
                assert mpc.power == pytest.approx(1.0)
            np.testing.assert_array_equal(item.truth, np.zeros(5))

    def test_deterministic(self):
        """The same spec produces identical output."""
        spec = ScenarioSpec.from_dict(
            {
                "n_snapshots": 4,
                "noise_mpcs_per_snapshot": 3,
                "rng_seed": 7,
                "clusters": [{"birth": 0, "death": 3, "initial_centroid": [0, 0, 0]}],
            }
        )
        first, second = generate(spec), generate(spec)
        for a, b in zip(first, second):
            assert a.snapshot == b.snapshot
            np.testing.assert_array_equal(a.truth, b.truth)

    def test_labels_follow_lifetimes(self):
        """A cluster's label appears exactly during its lifetime."""
        spec = ScenarioSpec(
            n_snapshots=50,
            clusters=(
                ClusterSpec(birth=0, death=49, initial_centroid=(0, 0, 0)),
                ClusterSpec(birth=10, death=40, initial_centroid=(20, 0, 0)),
            ),
        )
        for item in generate(spec):
            present = 1 in item.truth
            assert present == (10 <= item.snapshot.index <= 40)

    def test_noise_mpcs(self):
        """Noise MPCs carry the noise label and sit 20 dB under the clusters."""
        spec = ScenarioSpec(
            n_snapshots=2,
            clusters=(ClusterSpec(birth=0, death=1, initial_centroid=(0, 0, 0), n_mpcs=4),),
            noise_mpcs_per_snapshot=6,
        )
        for item in generate(spec):
            noise = item.truth == NOISE_LABEL
            assert noise.sum() == 6
            assert np.allclose(item.snapshot.powers[noise], 0.01)

    def test_bs_offset(self):
        """BS-side coordinates are shifted by the cluster offset."""
        spec = ScenarioSpec(
            n_snapshots=1,
            clusters=(
                ClusterSpec(
                    birth=0, death=0, initial_centroid=(0, 0, 0), bs_offset=(5, 0, -1)
                ),
            ),
        )
        for mpc in generate(spec)[0].snapshot.mpcs:
            assert mpc.bs_pos == pytest.approx(
                (mpc.ms_pos[0] + 5, mpc.ms_pos[1], mpc.ms_pos[2] - 1)
            )

    def test_unique_path_ids(self):
        """Path IDs are unique within each snapshot."""
        spec = ScenarioSpec(
            n_snapshots=3,
            clusters=(
                ClusterSpec(birth=0, death=2, initial_centroid=(0, 0, 0)),
                ClusterSpec(birth=1, death=2, initial_centroid=(9, 0, 0)),
            ),
            noise_mpcs_per_snapshot=2,
        )
        for item in generate(spec):
            ids = item.snapshot.path_ids
            assert len(set(ids.tolist())) == len(ids)

    def test_empty_snapshot_rejected(self):
        """A snapshot without clusters or noise cannot be generated."""
        spec = ScenarioSpec(
            n_snapshots=3,
            clusters=(ClusterSpec(birth=0, death=0, initial_centroid=(0, 0, 0)),),
        )
        with pytest.raises(InvalidSpec):
            generate(spec)


class TestScore:
    """Tests for match_snapshot and score functions."""

    def test_identical_labelling(self):
        """A perfect run scores 1, 1 and 0."""
        truth = [labelled(0, [1, 1, 2, 2], [0, 0, 1, 1]), labelled(1, [1, 1, 2, 2], [0, 0, 1, 1])]
        found = [{0: 5, 1: 5, 2: 6, 3: 6}, {0: 5, 1: 5, 2: 6, 3: 6}]
        report = score(found, truth, {5: 2, 6: 2})
        assert report.accuracy == (1.0, 1.0)
        assert report.id_continuity == 1.0
        assert report.lifetime_error == 0.0

    def test_merged_clusters_half_accuracy(self):
        """One found cluster over two equal true clusters matches half the power."""
        accuracy, mapping = match_snapshot(
            {0: 0, 1: 0, 2: 0, 3: 0}, labelled(0, [1, 1, 1, 1], [0, 0, 1, 1])
        )
        assert accuracy == pytest.approx(0.5)
        assert len(mapping) == 1

    def test_permutation_invariant(self):
        """Renaming found IDs does not change accuracy."""
        truth = labelled(0, [1, 2, 3, 4, 5], [0, 0, 1, 1, 2])
        a, _ = match_snapshot({0: 0, 1: 1, 2: 1, 3: 2, 4: 2}, truth)
        b, _ = match_snapshot({0: 9, 1: 4, 2: 4, 3: 7, 4: 7}, truth)
        assert a == pytest.approx(b)

    def test_noise_excluded(self):
        """Noise paths count neither for nor against accuracy."""
        truth = labelled(0, [1, 1, 0.01], [0, 0, NOISE_LABEL])
        accuracy, _ = match_snapshot({0: 3, 1: 3, 2: 4}, truth)
        assert accuracy == pytest.approx(1.0)

    def test_pruned_paths_unmatched(self):
        """Paths missing from the run count as unmatched power."""
        accuracy, _ = match_snapshot({0: 0}, labelled(0, [3, 1], [0, 0]))
        assert accuracy == pytest.approx(0.75)

    def test_id_switch_breaks_continuity(self):
        """A track ID change of a persisting cluster lowers continuity."""
        truth = [labelled(n, [1, 1], [0, 0]) for n in range(3)]
        found = [{0: 0, 1: 0}, {0: 0, 1: 0}, {0: 1, 1: 1}]
        report = score(found, truth, {0: 2, 1: 1})
        assert report.id_continuity == pytest.approx(0.5)

    def test_lifetime_error(self):
        """Lifetime error compares the dominant track with the true lifetime."""
        truth = [labelled(n, [1, 1], [0, 0]) for n in range(4)]
        found = [{0: 0, 1: 0}] * 4
        report = score(found, truth, {0: 2})
        assert report.lifetime_error == pytest.approx(2.0)

    def test_snapshot_count_mismatch(self):
        """Run and truth must cover the same snapshots."""
        with pytest.raises(DimensionMismatch):
            score([{}], [], {})

    def test_too_many_clusters(self):
        """More than eight clusters on both sides is refused."""
        truth = labelled(0, [1.0] * 9, list(range(9)))
        with pytest.raises(TooManyClustersForExactMatching):
            match_snapshot({i: i for i in range(9)}, truth)

    def test_report_dict(self):
        """to_dict summarizes the report."""
        truth = [labelled(0, [1, 1], [0, 0])]
        summary = score([{0: 0, 1: 0}], truth, {0: 1}).to_dict()
        assert summary["mean_accuracy"] == 1.0
        assert summary["snapshots"] == 1
