"""Tests for the fuzzy c-means engine."""

import numpy as np
import pytest
from sklearn.base import clone

from fuzzycvi import (CentroidReseedWarning, FuzzyCMeans, fcm_objective,
                      update_centroids, update_memberships)


def make_blobs(n_per=30, centers=((-4.0, 0.0), (4.0, 0.0), (0.0, 6.0)),
               scale=0.4, seed=0):
    rng = np.random.default_rng(seed)
    parts = [rng.normal(loc=c, scale=scale, size=(n_per, len(c))) for c in centers]
    return np.vstack(parts)


def naive_memberships(X, V, m):
    """Reference update with explicit loops, including the coincident rule."""
    n, c = X.shape[0], V.shape[0]
    U = np.zeros((n, c))
    for i in range(n):
        d = np.array([np.linalg.norm(X[i] - V[j]) for j in range(c)])
        hit = d < 1e-12
        if hit.any():
            U[i, hit] = 1.0 / hit.sum()
            continue
        for j in range(c):
            U[i, j] = 1.0 / np.sum((d[j] / d) ** (2.0 / (m - 1.0)))
    return U


def naive_centroids(X, U, m):
    n, c = X.shape[0], U.shape[1]
    V = np.zeros((c, X.shape[1]))
    for j in range(c):
        w = U[:, j] ** m
        V[j] = (w[:, None] * X).sum(axis=0) / w.sum()
    return V


def naive_objective(X, V, U, m):
    total = 0.0
    for i in range(X.shape[0]):
        for j in range(V.shape[0]):
            total += (U[i, j] ** m) * np.sum((X[i] - V[j]) ** 2)
    return total


def test_membership_update_matches_loop_oracle():
    rng = np.random.default_rng(3)
    for _ in range(10):
        X = rng.normal(size=(25, 3))
        V = rng.normal(size=(4, 3))
        for m in (1.5, 2.0, 3.0):
            U = update_memberships(X, V, m)
            assert np.allclose(U, naive_memberships(X, V, m), atol=1e-12)
            assert np.allclose(U.sum(axis=1), 1.0)


def test_centroid_update_matches_loop_oracle():
    rng = np.random.default_rng(4)
    X = rng.normal(size=(30, 2))
    U = rng.dirichlet(np.ones(3), size=30)
    for m in (1.5, 2.0, 2.8):
        V = update_centroids(X, U, m)
        assert np.allclose(V, naive_centroids(X, U, m), atol=1e-12)


def test_objective_matches_loop_oracle():
    rng = np.random.default_rng(5)
    X = rng.normal(size=(20, 2))
    V = rng.normal(size=(3, 2))
    U = rng.dirichlet(np.ones(3), size=20)
    got = fcm_objective(X, V, U, 2.0)
    assert got == pytest.approx(naive_objective(X, V, U, 2.0), rel=1e-12)


def test_crisp_fixture_objective():
    # two tight pairs on a line; crisp memberships at the pair midpoints
    X = np.array([[0.0], [1.0], [10.0], [11.0]])
    V = np.array([[0.5], [10.5]])
    U = np.array([[1.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.0, 1.0]])
    assert fcm_objective(X, V, U, 2.0) == pytest.approx(1.0, abs=1e-15)


def test_coincident_point_gets_crisp_row():
    X = np.array([[0.0, 0.0], [5.0, 5.0], [9.0, 1.0]])
    V = np.array([[5.0, 5.0], [0.0, -3.0]])
    U = update_memberships(X, V, 2.0)
    assert U[1, 0] == 1.0 and U[1, 1] == 0.0
    # a point sitting on two coincident centroids splits equally
    V2 = np.array([[5.0, 5.0], [5.0, 5.0]])
    U2 = update_memberships(X, V2, 2.0)
    assert np.allclose(U2[1], [0.5, 0.5])


def test_membership_update_permutation_equivariant():
    rng = np.random.default_rng(6)
    X = rng.normal(size=(15, 2))
    V = rng.normal(size=(4, 2))
    perm = np.array([2, 0, 3, 1])
    U = update_memberships(X, V, 2.0)
    U_perm = update_memberships(X, V[perm], 2.0)
    # summation order differs, so equality holds only to rounding noise
    assert np.allclose(U[:, perm], U_perm, rtol=1e-14, atol=1e-15)


def test_membership_update_rigid_motion():
    rng = np.random.default_rng(7)
    X = rng.normal(size=(20, 2))
    V = rng.normal(size=(3, 2))
    U = update_memberships(X, V, 2.0)
    # negation is exact in floating point
    assert np.array_equal(U, update_memberships(-X, -V, 2.0))
    shift = np.array([13.5, -2.25])
    assert np.allclose(U, update_memberships(X + shift, V + shift, 2.0), atol=1e-9)


def test_scaling_behavior():
    rng = np.random.default_rng(8)
    X = rng.normal(size=(20, 2))
    U = rng.dirichlet(np.ones(3), size=20)
    V = update_centroids(X, U, 2.0)
    s = 3.5
    assert np.allclose(update_centroids(s * X, U, 2.0), s * V)
    assert fcm_objective(s * X, s * V, U, 2.0) == pytest.approx(
        s * s * fcm_objective(X, V, U, 2.0), rel=1e-12)


def test_empty_cluster_reseeded_with_warning():
    X = np.array([[0.0], [1.0], [2.0], [3.0]])
    U = np.array([[1.0, 0.0], [1.0, 0.0], [1.0, 0.0], [1.0, 0.0]])
    rng = np.random.default_rng(0)
    with pytest.warns(CentroidReseedWarning):
        V = update_centroids(X, U, 2.0, rng=rng)
    # the reseeded centroid is one of the data points
    assert any(np.allclose(V[1], x) for x in X)


def test_fit_on_blobs_converges():
    X = make_blobs(seed=1)
    est = FuzzyCMeans(n_clusters=3, random_state=0, n_init=5)
    est.fit(X)
    assert est.converged_
    assert est.membership_.shape == (X.shape[0], 3)
    assert np.allclose(est.membership_.sum(axis=1), 1.0)
    assert est.labels_.shape == (X.shape[0],)
    assert len(est.restart_objectives_) == 5
    assert est.objective_ == min(est.restart_objectives_)
    # each true blob is dominated by a single fitted cluster
    for k in range(3):
        block = est.labels_[30 * k:30 * (k + 1)]
        counts = np.bincount(block, minlength=3)
        assert counts.max() == 30


def test_objective_history_monotone():
    X = make_blobs(seed=2)
    est = FuzzyCMeans(n_clusters=3, random_state=1, n_init=1).fit(X)
    h = np.array(est.objective_history_)
    assert np.all(np.diff(h) <= 0.0)
    assert h[-2] - h[-1] < est.tol


def test_same_seed_bitwise_identical():
    X = make_blobs(seed=3)
    a = FuzzyCMeans(n_clusters=3, random_state=42, n_init=4).fit(X)
    b = FuzzyCMeans(n_clusters=3, random_state=42, n_init=4).fit(X)
    assert np.array_equal(a.cluster_centers_, b.cluster_centers_)
    assert np.array_equal(a.membership_, b.membership_)
    assert a.objective_ == b.objective_
    assert a.restart_objectives_ == b.restart_objectives_


def test_different_seeds_explore_different_starts():
    X = make_blobs(seed=4)
    a = FuzzyCMeans(n_clusters=3, random_state=0, n_init=1).fit(X)
    b = FuzzyCMeans(n_clusters=3, random_state=5, n_init=1).fit(X)
    # same converged solution is fine; the paths must be independent draws
    assert a.objective_ == pytest.approx(b.objective_, rel=1e-4)


def test_more_restarts_never_worse():
    rng = np.random.default_rng(9)
    X = rng.uniform(size=(60, 2))  # messy data with real local minima
    one = FuzzyCMeans(n_clusters=5, random_state=7, n_init=1).fit(X)
    many = FuzzyCMeans(n_clusters=5, random_state=7, n_init=10).fit(X)
    assert many.objective_ <= one.objective_ + 1e-12


def test_predict_and_transform():
    X = make_blobs(seed=5)
    est = FuzzyCMeans(n_clusters=3, random_state=0, n_init=2).fit(X)
    U = est.predict_proba(X)
    assert np.allclose(U, est.transform(X))
    labels = est.predict(X)
    assert np.array_equal(labels, np.argmax(U, axis=1))
    with pytest.raises(ValueError):
        est.predict_proba(X[:, :1])  # wrong feature count


def test_one_dimensional_input_accepted():
    X = np.array([0.0, 0.2, 0.1, 5.0, 5.2, 5.1])
    est = FuzzyCMeans(n_clusters=2, random_state=0, n_init=2).fit(X)
    assert est.cluster_centers_.shape == (2, 1)
    assert sorted(np.round(est.cluster_centers_.ravel(), 1)) == [0.1, 5.1]


def test_parameter_validation():
    X = np.zeros((5, 2))
    with pytest.raises(ValueError):
        FuzzyCMeans(n_clusters=1).fit(X)
    with pytest.raises(ValueError):
        FuzzyCMeans(n_clusters=6).fit(X)  # more clusters than points
    with pytest.raises(ValueError):
        FuzzyCMeans(n_clusters=2, m=1.0).fit(X)
    with pytest.raises(ValueError):
        FuzzyCMeans(n_clusters=2).fit(np.array([[0.0, np.nan]] * 5))


def test_sklearn_clone_compatible():
    est = FuzzyCMeans(n_clusters=4, m=1.8, n_init=3, random_state=11)
    cloned = clone(est)
    assert cloned.get_params() == est.get_params()
