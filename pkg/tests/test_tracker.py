"""Unit tests for Kalman tracking and cluster association."""

import numpy as np
import pytest

from src.mpc_cluster_tracker.core.tracker import (
    KalmanModel,
    TrackRegistry,
    associate,
    predict,
    step_registry,
    update,
)
from src.mpc_cluster_tracker.models import ClusterParams, Clustering, PipelineConfig, TrackState


def make_cluster(cluster_id, centroid, spread=None, power=1.0, members=None) -> ClusterParams:
    """Create a cluster observation."""
    return ClusterParams(
        cluster_id=cluster_id,
        members=frozenset(members if members is not None else [cluster_id]),
        power=power,
        centroid=np.asarray(centroid, dtype=float),
        spread=np.eye(3) if spread is None else np.asarray(spread, dtype=float),
    )


def make_clustering(clusters) -> Clustering:
    """Wrap clusters in a clustering with one member path each."""
    clusters = tuple(clusters)
    path_ids = np.array([min(c.members) for c in clusters], dtype=np.int64)
    return Clustering(
        clusters=clusters,
        assignment=np.arange(len(clusters), dtype=np.int64),
        path_ids=path_ids,
        objective=0.0,
    )


def make_track(theta, cov) -> TrackState:
    """Create a track with the given state."""
    theta = np.asarray(theta, dtype=float)
    return TrackState(
        cluster_id=0,
        theta=theta,
        cov=np.asarray(cov, dtype=float),
        born_at=0,
        last_seen=0,
        last_cluster=make_cluster(0, theta[0::2]),
    )


class TestKalmanModel:
    """Tests for KalmanModel class."""

    def test_matrices(self):
        """Transition and observation matrices follow the constant-velocity model."""
        model = KalmanModel.build(1e-4, 0.04)
        block = np.array([[1.0, 1.0], [0.0, 1.0]])
        np.testing.assert_array_equal(model.A[0:2, 0:2], block)
        np.testing.assert_array_equal(model.A[4:6, 4:6], block)
        assert model.A[0:2, 2:4].sum() == 0
        expected_d = np.zeros((3, 6))
        expected_d[0, 0] = expected_d[1, 2] = expected_d[2, 4] = 1.0
        np.testing.assert_array_equal(model.D, expected_d)
        np.testing.assert_allclose(model.Q, 1e-4 * np.eye(6))
        np.testing.assert_allclose(model.R, 0.04 * np.eye(3))

    def test_initial_covariance(self):
        """New tracks get r_scale position and factor * r_scale velocity variance."""
        model = KalmanModel.build(1e-4, 0.04, velocity_var_factor=10.0)
        np.testing.assert_allclose(np.diag(model.initial_cov), [0.04, 0.4] * 3)

    def test_from_config(self):
        """from_config uses the config's noise scales."""
        model = KalmanModel.from_config(PipelineConfig(q_scale=2e-4, r_scale=0.1))
        np.testing.assert_allclose(model.Q, 2e-4 * np.eye(6))
        np.testing.assert_allclose(model.R, 0.1 * np.eye(3))

    def test_initial_state_at_rest(self):
        """A new track starts at the centroid with zero velocity."""
        theta = KalmanModel.build(1e-4, 0.04).initial_state((1, 2, 3))
        np.testing.assert_array_equal(theta, [1, 0, 2, 0, 3, 0])


class TestPredict:
    """Tests for predict function."""

    def test_constant_velocity_step(self):
        """Position advances by one velocity step."""
        model = KalmanModel.build(0.0, 1.0)
        theta_pred, _ = predict(make_track([1, 0.5, 2, 0, 3, -1], np.eye(6)), model)
        np.testing.assert_allclose(model.D @ theta_pred, [1.5, 2, 2])
        np.testing.assert_allclose(theta_pred[1::2], [0.5, 0, -1])

    def test_covariance(self):
        """Predicted covariance is A M A^T + Q."""
        model = KalmanModel.build(0.01, 1.0)
        _, cov_pred = predict(make_track(np.zeros(6), np.eye(6)), model)
        np.testing.assert_allclose(cov_pred, model.A @ model.A.T + 0.01 * np.eye(6))


class TestUpdate:
    """Tests for update function."""

    def test_zero_innovation(self):
        """An observation at the predicted position leaves the state unchanged."""
        model = KalmanModel.build(1e-4, 0.04)
        theta_pred = np.array([1.0, 0.2, 2.0, 0.0, 3.0, -0.1])
        theta, _ = update(theta_pred, np.eye(6), model.D @ theta_pred, model)
        np.testing.assert_allclose(theta, theta_pred)

    def test_half_gain(self):
        """Equal prior and observation variance moves halfway."""
        model = KalmanModel.build(1e-4, 1.0)
        theta, cov = update(np.zeros(6), np.eye(6), (2, 4, 6), model)
        np.testing.assert_allclose(theta[0::2], [1, 2, 3])
        np.testing.assert_allclose(theta[1::2], 0, atol=1e-12)
        np.testing.assert_allclose(np.diag(cov)[0::2], 0.5)

    def test_exact_observation_limit(self):
        """With vanishing observation noise the position snaps to the observation."""
        model = KalmanModel.build(1e-4, 1e-12)
        theta, _ = update(np.zeros(6), np.eye(6), (2, -4, 6), model)
        np.testing.assert_allclose(theta[0::2], [2, -4, 6], atol=1e-6)

    def test_covariance_stays_positive_semidefinite(self):
        """Covariances stay symmetric PSD over many steps."""
        rng = np.random.default_rng(30)
        model = KalmanModel.build(1e-4, 0.04)
        track = make_track(np.zeros(6), model.initial_cov)
        for _ in range(200):
            theta_pred, cov_pred = predict(track, model)
            theta, cov = update(theta_pred, cov_pred, rng.normal(size=3), model)
            np.testing.assert_allclose(cov, cov.T, atol=1e-15)
            assert np.linalg.eigvalsh(cov).min() >= -1e-12
            track = make_track(theta, cov)

    def test_filters_noisy_constant_velocity(self):
        """Filtered positions beat the raw observation noise."""
        rng = np.random.default_rng(31)
        sigma = 0.2
        model = KalmanModel.build(1e-4, sigma**2)
        velocity = np.array([0.05, -0.02, 0.01])
        start = np.array([1.0, 2.0, 3.0])

        observation = start + rng.normal(0, sigma, 3)
        track = make_track(model.initial_state(observation), model.initial_cov)
        errors = []
        for n in range(1, 100):
            truth = start + velocity * n
            theta_pred, cov_pred = predict(track, model)
            theta, cov = update(theta_pred, cov_pred, truth + rng.normal(0, sigma, 3), model)
            track = make_track(theta, cov)
            if n >= 20:
                errors.append(np.sum((theta[0::2] - truth) ** 2))
        rms = np.sqrt(np.mean(errors) / 3)
        assert rms <= sigma


class TestAssociate:
    """Tests for associate function."""

    def test_identical_sets(self):
        """Each cluster pairs with its copy."""
        clusters = [make_cluster(i, (10.0 * i, 0, 0)) for i in range(3)]
        result = associate(clusters, clusters, 1e-6)
        assert sorted(result.pairs) == [(0, 0), (1, 1), (2, 2)]
        assert result.unmatched_old == ()
        assert result.unmatched_new == ()

    def test_no_old_clusters(self):
        """Without old clusters every new cluster is unmatched."""
        new = [make_cluster(i, (i, 0, 0)) for i in range(2)]
        result = associate([], new, 1e-6)
        assert result.pairs == ()
        assert result.unmatched_new == (0, 1)

    def test_no_new_clusters(self):
        """Without new clusters every old cluster is unmatched."""
        old = [make_cluster(4, (0, 0, 0)), make_cluster(7, (5, 0, 0))]
        result = associate(old, [], 1e-6)
        assert result.pairs == ()
        assert result.unmatched_old == (4, 7)

    def test_one_mutual_pair(self):
        """Only mutually closest clusters are associated."""
        old = [make_cluster(0, (0, 0, 0)), make_cluster(1, (10, 0, 0))]
        new = [make_cluster(0, (1, 0, 0)), make_cluster(1, (2, 0, 0))]
        result = associate(old, new, 1e-6)
        assert result.pairs == ((0, 0),)
        assert result.unmatched_old == (1,)
        assert result.unmatched_new == (1,)

    def test_at_most_one_partner(self):
        """No cluster appears in two pairs."""
        rng = np.random.default_rng(32)
        for _ in range(50):
            old = [make_cluster(i, rng.normal(size=3) * 5) for i in range(int(rng.integers(1, 6)))]
            new = [make_cluster(i, rng.normal(size=3) * 5) for i in range(int(rng.integers(1, 6)))]
            result = associate(old, new, 1e-6)
            olds = [p[0] for p in result.pairs]
            news = [p[1] for p in result.pairs]
            assert len(set(olds)) == len(olds)
            assert len(set(news)) == len(news)
            assert len(result.pairs) + len(result.unmatched_old) == len(old)
            assert len(result.pairs) + len(result.unmatched_new) == len(new)

    def test_symmetric(self):
        """Swapping old and new transposes the pairs."""
        rng = np.random.default_rng(33)
        for _ in range(50):
            old = [
                make_cluster(i, rng.normal(size=3) * 5, np.diag(rng.uniform(0.5, 2, 3)))
                for i in range(4)
            ]
            new = [
                make_cluster(i, rng.normal(size=3) * 5, np.diag(rng.uniform(0.5, 2, 3)))
                for i in range(3)
            ]
            forward = {(a, b) for a, b in associate(old, new, 1e-6).pairs}
            backward = {(b, a) for a, b in associate(new, old, 1e-6).pairs}
            assert forward == backward


class TestStepRegistry:
    """Tests for step_registry function."""

    def test_cold_start(self):
        """The first snapshot creates tracks 0..k-1 at rest."""
        model = KalmanModel.build(1e-4, 0.04)
        clusters = [make_cluster(i, (10.0 * i, 0, 0)) for i in range(3)]
        step = step_registry(TrackRegistry(), make_clustering(clusters), model, 0)
        assert [t.cluster_id for t in step.registry.active] == [0, 1, 2]
        assert [c.cluster_id for c in step.clustering.clusters] == [0, 1, 2]
        for track in step.registry.active:
            np.testing.assert_array_equal(track.velocity, np.zeros(3))
            assert track.born_at == 0
        assert step.registry.next_id == 3
        assert len(step.predictions) == 3

    def test_ids_persist_and_new_ids_fresh(self):
        """Associated clusters keep IDs; new clusters get unused IDs."""
        model = KalmanModel.build(1e-4, 0.04)
        first = [make_cluster(i, (10.0 * i, 0, 0)) for i in range(2)]
        step = step_registry(TrackRegistry(), make_clustering(first), model, 0)
        second = [
            make_cluster(0, (50, 50, 50)),
            make_cluster(1, (10.1, 0, 0)),
            make_cluster(2, (0.1, 0, 0)),
        ]
        step = step_registry(step.registry, make_clustering(second), model, 1)
        assert [c.cluster_id for c in step.clustering.clusters] == [2, 1, 0]
        assert step.registry.next_id == 3

    def test_retired_track_lifetime(self):
        """A track seen at 3..6 and missed at 7 retires with lifetime 4."""
        model = KalmanModel.build(1e-4, 0.04)
        registry = TrackRegistry()
        for n in range(3, 7):
            step = step_registry(
                registry, make_clustering([make_cluster(0, (0.01 * n, 0, 0))]), model, n
            )
            registry = step.registry
        step = step_registry(registry, make_clustering([]), model, 7)
        assert step.registry.active == ()
        (track,) = step.registry.retired
        assert track.born_at == 3
        assert track.last_seen == 6
        assert track.lifetime == 4
        assert len(track.history) == 4

    def test_velocity_converges(self):
        """A steadily moving cluster yields the right velocity estimate."""
        model = KalmanModel.build(1e-4, 0.01)
        registry = TrackRegistry()
        spread = 0.01 * np.eye(3)
        for n in range(20):
            cluster = make_cluster(0, (0.05 * n, 0, 0), spread)
            registry = step_registry(registry, make_clustering([cluster]), model, n).registry
        (track,) = registry.active
        assert track.cluster_id == 0
        assert track.velocity[0] == pytest.approx(0.05, rel=0.1)
        assert abs(track.velocity[1]) < 0.005

    def test_predictions_follow_velocity(self):
        """Predicted centroids are one velocity step ahead."""
        model = KalmanModel.build(1e-4, 0.04)
        registry = TrackRegistry()
        step = None
        for n in range(30):
            cluster = make_cluster(0, (0.1 * n, 0, 0), 0.01 * np.eye(3), power=3.0)
            step = step_registry(registry, make_clustering([cluster]), model, n)
            registry = step.registry
        (prediction,) = step.predictions
        assert prediction.cluster_id == 0
        assert prediction.power == 3.0
        assert prediction.position[0] == pytest.approx(3.0, abs=0.05)
