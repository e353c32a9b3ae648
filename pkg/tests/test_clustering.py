import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clusterpredict.clustering import (
    KMeansConfig,
    KMeansModel,
    assign_nearest,
    assign_rows,
    kmeans_fit,
    kmeans_objective,
    lloyd_step,
)
from clusterpredict.errors import ConfigError, DimensionMismatch, EmptyMatrix, KTooLarge
from clusterpredict.featurizer import FeatureMatrix


def brute_force_optimum(X, k):
    """Smallest within-cluster sum of squares over every assignment of rows to k labels."""
    best = np.inf
    for labels in itertools.product(range(k), repeat=len(X)):
        labels = np.array(labels)
        total = 0.0
        for j in range(k):
            members = X[labels == j]
            if len(members):
                total += float(((members - members.mean(axis=0)) ** 2).sum())
        best = min(best, total)
    return best


def model_with(centroids):
    c = np.asarray(centroids, dtype=float)
    return KMeansModel(c, np.zeros(0, dtype=int), 0.0, 0, True, (0.0,))


SQUARE = np.array([[0, 0], [0, 1], [10, 0], [10, 1]], dtype=float)


def test_four_point_square_optimum_and_fixed_points():
    assert brute_force_optimum(SQUARE, 2) == 1.0
    # {(0,0),(10,0)} | {(0,1),(10,1)} has centroids (5,0),(5,1); every row is
    # 25 from its own centroid and 26 from the other, so Lloyd cannot leave it
    stuck = np.array([0, 1, 0, 1])
    centroids = np.array([[5.0, 0.0], [5.0, 1.0]])
    assert kmeans_objective(SQUARE, centroids, stuck) == 100.0
    _, _, changed = lloyd_step(SQUARE, centroids, stuck)
    assert not changed
    outcomes = {kmeans_fit(SQUARE, KMeansConfig(2, seed)).objective for seed in range(100)}
    assert outcomes <= {1.0, 100.0}
    assert 1.0 in outcomes


def test_square_optimal_partition_when_reached():
    for seed in range(100):
        model = kmeans_fit(SQUARE, KMeansConfig(2, seed))
        if model.objective == 1.0:
            a = model.assignments
            assert a[0] == a[1] != a[2] == a[3]
            assert sorted(map(tuple, model.centroids)) == [(0.0, 0.5), (10.0, 0.5)]
            return
    pytest.fail("no seed reached the optimum")


def test_k1_closed_form(rng):
    X = rng.integers(0, 5, size=(30, 4)).astype(float)
    model = kmeans_fit(X, KMeansConfig(1, 3))
    assert np.allclose(model.centroids[0], X.mean(axis=0), atol=1e-12)
    assert model.objective == pytest.approx(((X - X.mean(axis=0)) ** 2).sum(), abs=1e-9)
    assert model.converged and model.iterations_run == 1


def test_single_row():
    model = kmeans_fit(np.array([[3.0, 4.0]]), KMeansConfig(1))
    assert model.objective == 0.0
    assert model.assignments.tolist() == [0]


def test_objective_hand_values():
    assert kmeans_objective(np.array([[0.0], [2.0]]), [[1.0]], [0, 0]) == 2.0
    assert kmeans_objective(np.array([[0.0], [2.0]]), [[0.0], [2.0]], [0, 1]) == 0.0


def test_objective_dimension_checks():
    with pytest.raises(DimensionMismatch):
        kmeans_objective(np.zeros((2, 2)), np.zeros((1, 3)), [0, 0])
    with pytest.raises(DimensionMismatch):
        kmeans_objective(np.zeros((2, 2)), np.zeros((1, 2)), [0])


def test_assign_nearest_examples():
    model = model_with([[0.0, 0.0], [10.0, 10.0]])
    assert assign_nearest(model, [1.0, 1.0]) == 0
    assert assign_nearest(model, [9.0, 9.0]) == 1
    assert assign_nearest(model, [5.0, 5.0]) == 0  # equidistant -> lowest id
    assert assign_nearest(model, ((1, 9.0),)) == 0  # sparse (col, count) pairs


def test_assign_nearest_rejects_width():
    with pytest.raises(DimensionMismatch):
        assign_nearest(model_with([[0.0, 0.0]]), [1.0, 2.0, 3.0])


def test_empty_row_goes_nearest_origin():
    model = model_with([[3.0, 0.0], [1.0, 1.0]])
    assert assign_nearest(model, ()) == 1


def test_errors():
    with pytest.raises(EmptyMatrix):
        kmeans_fit(np.zeros((0, 3)))
    with pytest.raises(KTooLarge):
        kmeans_fit(np.zeros((2, 3)), KMeansConfig(3))
    with pytest.raises(ConfigError):
        KMeansConfig(0)


def test_identical_rows_keep_every_cluster_nonempty():
    X = np.ones((6, 2))
    model = kmeans_fit(X, KMeansConfig(3, 5))
    assert sorted(model.cluster_sizes()) != [0, 0, 6]
    assert min(model.cluster_sizes()) >= 1
    assert model.objective == 0.0


def test_empty_cluster_repair_moves_farthest_row():
    # both centroids start on the left; cluster 1's centroid is far off and captures nothing
    X = np.array([[0.0], [1.0], [9.0]])
    centroids = np.array([[1.0], [100.0]])
    new, c, changed = lloyd_step(X, centroids, np.array([0, 0, 1]))
    assert new.tolist() == [0, 0, 1]
    assert c.tolist() == [[0.5], [9.0]]
    assert not changed


def test_feature_matrix_input_matches_dense(rng):
    dense = rng.integers(0, 3, size=(20, 5))
    sparse = FeatureMatrix.from_dense(dense)
    a = kmeans_fit(dense, KMeansConfig(2, 11))
    b = kmeans_fit(sparse, KMeansConfig(2, 11))
    assert np.array_equal(a.assignments, b.assignments)
    assert np.array_equal(a.centroids, b.centroids)


def test_normalize_rows_option():
    X = np.array([[1.0, 0.0], [5.0, 0.0], [0.0, 1.0], [0.0, 7.0]])
    model = kmeans_fit(X, KMeansConfig(2, 0, normalize_rows=True))
    assert model.objective == pytest.approx(0.0, abs=1e-12)
    assert assign_rows(model, np.array([[9.0, 0.0]]))[0] == model.assignments[0]


def test_to_json_fields(rng):
    model = kmeans_fit(rng.random((10, 3)), KMeansConfig(2, 1))
    data = model.to_json()
    assert set(data) == {"k", "centroids", "objective", "iterations_run"}
    assert np.array_equal(np.array(data["centroids"]), model.centroids)


instances = st.tuples(
    st.integers(1, 8), st.integers(1, 3), st.integers(1, 3), st.integers(0, 2**32 - 1)
).filter(lambda t: t[2] <= t[0])


@settings(max_examples=120, deadline=None)
@given(instances)
def test_properties_on_random_instances(params):
    n, d, k, seed = params
    X = np.random.default_rng(seed).integers(0, 4, size=(n, d)).astype(float)
    model = kmeans_fit(X, KMeansConfig(k, seed))
    hist = np.array(model.objective_history)
    assert np.all(np.diff(hist) <= 1e-9)
    for j in range(k):
        members = X[model.assignments == j]
        assert len(members) >= 1
        assert np.allclose(model.centroids[j], members.mean(axis=0), atol=1e-9)
    assert model.objective >= brute_force_optimum(X, k) - 1e-9
    # a converged fit is a fixed point of one more Lloyd step
    assert model.converged
    new, centroids, changed = lloyd_step(X, model.centroids, model.assignments)
    assert not changed
    assert np.array_equal(new, model.assignments)
    again = kmeans_fit(X, KMeansConfig(k, seed))
    assert np.array_equal(again.assignments, model.assignments)
    assert again.objective_history == model.objective_history
