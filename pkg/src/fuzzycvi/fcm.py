"""Fuzzy c-means clustering with seeded multi-restart selection."""

from __future__ import annotations

import warnings

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import as_seed_sequence, check_data, check_membership, child_seed
from .exceptions import CentroidReseedWarning

# A point closer than this to a centroid is treated as lying on it.
COINCIDENT_TOL = 1e-12
# A membership column with less total weight than this is an empty cluster.
EMPTY_CLUSTER_TOL = 1e-12


def _distance_matrix(X: np.ndarray, V: np.ndarray) -> np.ndarray:
    # (n, p) vs (c, p) -> (n, c)
    sq = ((X[:, None, :] - V[None, :, :]) ** 2).sum(axis=2)
    return np.sqrt(np.maximum(sq, 0.0))


def update_memberships(X, centroids, m: float) -> np.ndarray:
    """One membership update from fixed centroids.

    Each row uses inverse-distance weights with exponent 2/(m - 1),
    normalized to sum to 1.  A point within 1e-12 of one or more centroids
    gets a crisp row split equally among the coincident centroids.
    """
    X = check_data(X, min_rows=1)
    V = check_data(centroids, min_rows=1, name="centroids")
    if X.shape[1] != V.shape[1]:
        raise ValueError(f"X has {X.shape[1]} features but centroids have {V.shape[1]}")
    if m <= 1.0:
        raise ValueError(f"m must be > 1, got {m}")

    D = _distance_matrix(X, V)
    on_centroid = D < COINCIDENT_TOL
    # Dividing by the row minimum keeps every weight in (0, 1] so large
    # exponents cannot overflow; the factor cancels in the normalization.
    dmin = D.min(axis=1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        W = (dmin / D) ** (2.0 / (m - 1.0))
        U = W / W.sum(axis=1, keepdims=True)
    crisp_rows = on_centroid.any(axis=1)
    if crisp_rows.any():
        hits = on_centroid[crisp_rows].astype(float)
        U[crisp_rows] = hits / hits.sum(axis=1, keepdims=True)
    return U


def _update_centroids_impl(X, U, m, rng):
    Um = U ** m
    weight = Um.sum(axis=0)
    empty = weight < EMPTY_CLUSTER_TOL
    V = np.zeros((U.shape[1], X.shape[1]))
    if (~empty).any():
        V[~empty] = (Um.T[~empty] @ X) / weight[~empty, None]
    for j in np.flatnonzero(empty):
        V[j] = X[rng.integers(X.shape[0])]
    return V, int(empty.sum())


def update_centroids(X, memberships, m: float, rng=None) -> np.ndarray:
    """One centroid update from fixed memberships.

    Centroid j is the mean of the data weighted by memberships**m.  A column
    with total weight below 1e-12 is re-seeded to a uniformly drawn data
    point and a CentroidReseedWarning is issued.
    """
    X = check_data(X, min_rows=1)
    U = check_membership(memberships, n_samples=X.shape[0])
    if m <= 1.0:
        raise ValueError(f"m must be > 1, got {m}")
    if rng is None:
        rng = np.random.default_rng()
    elif not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    V, n_reseeded = _update_centroids_impl(X, U, m, rng)
    if n_reseeded:
        warnings.warn(f"re-seeded {n_reseeded} empty cluster centroid(s)", CentroidReseedWarning)
    return V


def fcm_objective(X, centroids, memberships, m: float) -> float:
    """Weighted within-cluster sum of squared distances minimized by FCM."""
    X = check_data(X, min_rows=1)
    V = check_data(centroids, min_rows=1, name="centroids")
    U = check_membership(memberships, n_samples=X.shape[0], n_clusters=V.shape[0])
    if m <= 1.0:
        raise ValueError(f"m must be > 1, got {m}")
    D = _distance_matrix(X, V)
    return float(((U ** m) * D * D).sum())


def _fit_single(X, n_clusters, m, max_iter, tol, rng):
    """One FCM run from a random distinct-point initialization."""
    init_idx = rng.choice(X.shape[0], size=n_clusters, replace=False)
    V = X[init_idx].copy()
    U = update_memberships(X, V, m)
    history = [fcm_objective(X, V, U, m)]
    converged = False
    n_reseeded = 0
    for _ in range(max_iter):
        V, reseeded = _update_centroids_impl(X, U, m, rng)
        n_reseeded += reseeded
        U = update_memberships(X, V, m)
        history.append(fcm_objective(X, V, U, m))
        if history[-2] - history[-1] < tol:
            converged = True
            break
    return {
        "centroids": V,
        "memberships": U,
        "objective": history[-1],
        "n_iter": len(history) - 1,
        "converged": converged,
        "n_reseeded": n_reseeded,
        "history": history,
    }


class FuzzyCMeans(ClusterMixin, BaseEstimator):
    """Fuzzy c-means with deterministic multi-restart selection.

    Parameters
    ----------
    n_clusters : int, default=2
        Number of clusters c; must satisfy 2 <= c <= n_samples.
    m : float, default=2.0
        Fuzziness exponent, strictly greater than 1.
    max_iter : int, default=200
        Iteration cap for a single run.
    tol : float, default=1e-8
        A run stops once the absolute decrease of the objective between
        consecutive iterations falls below this value.
    n_init : int, default=20
        Number of independent restarts.  The run with the smallest final
        objective wins; ties keep the earliest restart.
    random_state : int, SeedSequence or None, default=None
        Source of the per-restart child seeds.  The same value reproduces
        the fit bit for bit.

    Attributes
    ----------
    cluster_centers_ : ndarray of shape (n_clusters, n_features)
    membership_ : ndarray of shape (n_samples, n_clusters)
        Fuzzy partition of the training data; rows sum to 1.
    labels_ : ndarray of shape (n_samples,)
        Hard assignment by largest membership (ties -> lowest index).
    objective_ : float
        Final objective of the winning restart.
    n_iter_ : int
    converged_ : bool
    n_reseeded_ : int
        Number of empty-cluster re-seed events in the winning restart.
    restart_objectives_ : list of float
        Final objective of every restart, in restart order.
    objective_history_ : list of float
        Objective after initialization and after each iteration of the
        winning restart; non-increasing.
    """

    def __init__(self, n_clusters: int = 2, *, m: float = 2.0, max_iter: int = 200,
                 tol: float = 1e-8, n_init: int = 20, random_state=None):
        self.n_clusters = n_clusters
        self.m = m
        self.max_iter = max_iter
        self.tol = tol
        self.n_init = n_init
        self.random_state = random_state

    def _validate_params_(self, n_samples: int) -> None:
        if not isinstance(self.n_clusters, (int, np.integer)) or self.n_clusters < 2:
            raise ValueError(f"n_clusters must be an integer >= 2, got {self.n_clusters!r}")
        if self.n_clusters > n_samples:
            raise ValueError(f"n_clusters={self.n_clusters} exceeds n_samples={n_samples}")
        if self.m <= 1.0:
            raise ValueError(f"m must be > 1, got {self.m}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")
        if self.tol <= 0.0:
            raise ValueError(f"tol must be > 0, got {self.tol}")
        if self.n_init < 1:
            raise ValueError(f"n_init must be >= 1, got {self.n_init}")

    def fit(self, X, y=None):
        """Run n_init seeded FCM restarts and keep the best solution."""
        X = check_data(X)
        self._validate_params_(X.shape[0])
        ss = as_seed_sequence(self.random_state)
        best = None
        restart_objectives = []
        for r in range(self.n_init):
            rng = np.random.default_rng(child_seed(ss, r))
            run = _fit_single(X, self.n_clusters, self.m, self.max_iter, self.tol, rng)
            restart_objectives.append(run["objective"])
            if best is None or run["objective"] < best["objective"]:
                best = run
        self.cluster_centers_ = best["centroids"]
        self.membership_ = best["memberships"]
        self.labels_ = best["memberships"].argmax(axis=1)
        self.objective_ = best["objective"]
        self.n_iter_ = best["n_iter"]
        self.converged_ = best["converged"]
        self.n_reseeded_ = best["n_reseeded"]
        self.restart_objectives_ = restart_objectives
        self.objective_history_ = best["history"]
        self.n_features_in_ = X.shape[1]
        return self

    def predict_proba(self, X) -> np.ndarray:
        """Membership degrees of new points toward the fitted centroids."""
        check_is_fitted(self, "cluster_centers_")
        X = check_data(X, min_rows=1)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, expected {self.n_features_in_}")
        return update_memberships(X, self.cluster_centers_, self.m)

    def predict(self, X) -> np.ndarray:
        """Hard cluster assignment by largest membership."""
        return self.predict_proba(X).argmax(axis=1)

    def transform(self, X) -> np.ndarray:
        """Alias of predict_proba, so the membership matrix composes in pipelines."""
        return self.predict_proba(X)
