"""Input validation and seeding helpers used throughout the package."""

from __future__ import annotations

import numpy as np

ROW_SUM_TOL = 1e-9


def check_data(X, *, min_rows: int = 2, name: str = "X") -> np.ndarray:
    """Coerce to a finite 2-D float array; 1-D input becomes a single column."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if X.ndim != 2:
        raise ValueError(f"{name} must be 1-D or 2-D, got ndim={X.ndim}")
    if X.shape[0] < min_rows:
        raise ValueError(f"{name} needs at least {min_rows} rows, got {X.shape[0]}")
    if X.shape[1] < 1:
        raise ValueError(f"{name} needs at least one feature column")
    if not np.all(np.isfinite(X)):
        raise ValueError(f"{name} contains non-finite values")
    return X


def check_membership(U, *, n_samples: int | None = None, n_clusters: int | None = None,
                     name: str = "memberships") -> np.ndarray:
    """Validate a fuzzy partition matrix: entries in [0, 1], rows summing to 1."""
    U = np.asarray(U, dtype=float)
    if U.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got ndim={U.ndim}")
    if n_samples is not None and U.shape[0] != n_samples:
        raise ValueError(f"{name} has {U.shape[0]} rows, expected {n_samples}")
    if n_clusters is not None and U.shape[1] != n_clusters:
        raise ValueError(f"{name} has {U.shape[1]} columns, expected {n_clusters}")
    if not np.all(np.isfinite(U)):
        raise ValueError(f"{name} contains non-finite values")
    if U.min() < -ROW_SUM_TOL or U.max() > 1.0 + ROW_SUM_TOL:
        raise ValueError(f"{name} entries must lie in [0, 1]")
    sums = U.sum(axis=1)
    if np.max(np.abs(sums - 1.0)) > ROW_SUM_TOL:
        bad = int(np.argmax(np.abs(sums - 1.0)))
        raise ValueError(f"{name} row {bad} sums to {sums[bad]!r}, expected 1")
    return U


def check_labels(y, *, n_samples: int | None = None, name: str = "labels") -> np.ndarray:
    """Validate an integer label vector."""
    y = np.asarray(y)
    if y.ndim != 1:
        raise ValueError(f"{name} must be 1-D, got ndim={y.ndim}")
    if n_samples is not None and y.shape[0] != n_samples:
        raise ValueError(f"{name} has length {y.shape[0]}, expected {n_samples}")
    if y.size and not np.issubdtype(y.dtype, np.integer):
        as_int = y.astype(int)
        if not np.array_equal(as_int, y):
            raise ValueError(f"{name} must be integer-valued")
        y = as_int
    return y.astype(int)


def as_seed_sequence(random_state) -> np.random.SeedSequence:
    """Normalize int / None / SeedSequence into a SeedSequence."""
    if isinstance(random_state, np.random.SeedSequence):
        return random_state
    if random_state is None or isinstance(random_state, (int, np.integer)):
        return np.random.SeedSequence(random_state)
    raise ValueError(f"random_state must be an int, None or SeedSequence, got {random_state!r}")


def child_seed(ss: np.random.SeedSequence, *key: int) -> np.random.SeedSequence:
    """Deterministic child stream addressed by `key`.

    Unlike SeedSequence.spawn this does not mutate the parent, so the same
    (seed, key) pair always yields the same stream no matter how many other
    children were derived before it.
    """
    base = tuple(ss.spawn_key)
    return np.random.SeedSequence(entropy=ss.entropy, spawn_key=base + tuple(int(k) for k in key))
