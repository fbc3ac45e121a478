"""Classical fuzzy cluster validity indexes: XB, PBM, Tang, WL, GC, Kwon2.

All functions score one fitted partition (data, centroids, memberships)
and raise DegeneracyError where the defining ratio stops making sense,
e.g. coincident centroids sitting in a denominator.  `compute_all`
evaluates a selection of indexes across fitted models and turns the
values into per-index rankings of the cluster count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist

from ._validation import check_data, check_membership
from .exceptions import DegeneracyError

COINCIDENT_TOL = 1e-12

REFERENCE_INDEXES = ("xb", "pbm", "tang", "wl", "gc", "kwon2")

# Optimization direction per index; "wp" is included so consumers can
# treat the whole selection uniformly.
DIRECTIONS = {
    "xb": "min",
    "pbm": "max",
    "tang": "min",
    "wl": "min",
    "gc": "min",
    "kwon2": "min",
    "wp": "max",
}

GC_PRODUCTS = ("sum_min", "sum_product", "max_min", "max_product")


def _checked(X, centroids, memberships):
    X = check_data(X)
    V = check_data(centroids, min_rows=2, name="centroids")
    U = check_membership(memberships, n_samples=X.shape[0], n_clusters=V.shape[0])
    if X.shape[1] != V.shape[1]:
        raise ValueError(f"X has {X.shape[1]} features but centroids have {V.shape[1]}")
    return X, V, U


def _point_centroid_sq(X, V):
    # (n, p) vs (c, p) -> (n, c) squared distances
    return ((X[:, None, :] - V[None, :, :]) ** 2).sum(axis=2)


def xb(X, centroids, memberships) -> float:
    """Xie-Beni: compactness over n times the smallest squared centroid gap."""
    X, V, U = _checked(X, centroids, memberships)
    gaps = pdist(V)
    if gaps.min() < COINCIDENT_TOL:
        raise DegeneracyError("coincident centroids: smallest centroid gap below 1e-12")
    num = float((U ** 2 * _point_centroid_sq(X, V)).sum())
    return num / (X.shape[0] * float(gaps.min()) ** 2)


def pbm(X, centroids, memberships) -> float:
    """PBM: (scatter toward the grand centroid times largest centroid gap,
    over c times the weighted point-centroid distances), squared."""
    X, V, U = _checked(X, centroids, memberships)
    c = V.shape[0]
    e1 = float(np.sqrt(((X - X.mean(axis=0)) ** 2).sum(axis=1)).sum())
    d_max = float(pdist(V).max())
    within = float((U * np.sqrt(_point_centroid_sq(X, V))).sum())
    den = c * within
    if den == 0.0:
        raise DegeneracyError("every point sits on a centroid with crisp membership")
    return (e1 * d_max / den) ** 2


def tang(X, centroids, memberships) -> float:
    """Tang: compactness plus mean squared centroid gap, over the smallest
    squared gap regularized by 1/c.  Finite even with coincident centroids."""
    X, V, U = _checked(X, centroids, memberships)
    c = V.shape[0]
    compact = float((U ** 2 * _point_centroid_sq(X, V)).sum())
    gaps_sq = pdist(V) ** 2
    # ordered pairs double the unordered sum
    penalty = 2.0 * float(gaps_sq.sum()) / (c * (c - 1))
    return (compact + penalty) / (float(gaps_sq.min()) + 1.0 / c)


def wl(X, centroids, memberships) -> float:
    """WL: per-cluster normalized compactness over the smallest plus the
    median squared centroid gap."""
    X, V, U = _checked(X, centroids, memberships)
    col = U.sum(axis=0)
    if np.any(col == 0.0):
        raise DegeneracyError(f"membership column {int(np.argmin(col))} is all zero")
    per_cluster = (U ** 2 * _point_centroid_sq(X, V)).sum(axis=0) / col
    gaps_sq = pdist(V) ** 2
    den = float(gaps_sq.min()) + float(np.median(gaps_sq))
    if den == 0.0:
        raise DegeneracyError("centroid gaps collapsed; smallest plus median gap is 0")
    return float(per_cluster.sum()) / den


def _pair_similarity(U, product):
    n = U.shape[0]
    out = np.empty(n * (n - 1) // 2)
    pos = 0
    for i in range(n - 1):
        rest = U[i + 1:]
        if product == "sum_min":
            block = np.minimum(U[i], rest).sum(axis=1)
        elif product == "sum_product":
            block = rest @ U[i]
        elif product == "max_min":
            block = np.minimum(U[i], rest).max(axis=1)
        else:  # max_product
            block = (U[i] * rest).max(axis=1)
        out[pos:pos + block.size] = block
        pos += block.size
    return out


def gc(X, memberships, product: str = "sum_min") -> float:
    """Generalized C: rescaled weighted sum of pair distances.

    Pair weights come from the chosen membership product (default: sum of
    elementwise minima).  The observed weighted sum is rescaled between the
    extremes obtained by pairing the largest distances with the largest
    (respectively smallest) weights over the effective within-pair count.
    """
    X = check_data(X)
    U = check_membership(memberships, n_samples=X.shape[0])
    if product not in GC_PRODUCTS:
        raise ValueError(f"product must be one of {GC_PRODUCTS}, got {product!r}")
    d = pdist(X)
    r = _pair_similarity(U, product)
    observed = float(r @ d)
    col = U.sum(axis=0)
    n_ws = math.floor(float((col * (col - 1.0)).sum() / 2.0))
    n_ws = max(0, min(n_ws, d.size))
    if n_ws == 0:
        raise DegeneracyError("effective within-pair count is 0")
    d_desc = np.sort(d)[::-1][:n_ws]
    r_sorted = np.sort(r)
    top = float(d_desc @ r_sorted[::-1][:n_ws])
    bottom = float(d_desc @ r_sorted[:n_ws])
    if top == bottom:
        raise DegeneracyError("pair-weight extremes coincide; rescaling undefined")
    return (observed - bottom) / (top - bottom)


def kwon2(X, centroids, memberships, m: float) -> float:
    """Kwon2: size-corrected compactness and centroid scatter over the
    smallest squared centroid gap with 1/c regularizers."""
    X, V, U = _checked(X, centroids, memberships)
    if m <= 1.0:
        raise ValueError(f"m must be > 1, got {m}")
    n, c = U.shape
    if n == c:
        raise DegeneracyError("n == c leaves no room for the size correction")
    w1 = (n - c + 1) / n
    w2 = (c / (c - 1)) ** math.sqrt(2.0)
    w3 = n * c / (n - c + 1) ** 2
    exponent = 2.0 ** math.sqrt(m / 2.0)
    compact = float((U ** exponent * _point_centroid_sq(X, V)).sum())
    scatter_sq = ((V - X.mean(axis=0)) ** 2).sum(axis=1)
    peak = float(scatter_sq.max())
    if peak == 0.0:
        raise DegeneracyError("all centroids sit on the grand centroid")
    scatter = float(scatter_sq.sum()) / peak
    gaps_sq = pdist(V) ** 2
    den = float(gaps_sq.min()) + 1.0 / c + 1.0 / c ** (m - 1.0)
    return w1 * (w2 * compact + scatter + w3) / den


def _evaluate(name, X, model, m):
    V = np.asarray(model.cluster_centers_, dtype=float)
    U = np.asarray(model.membership_, dtype=float)
    if name == "xb":
        return xb(X, V, U)
    if name == "pbm":
        return pbm(X, V, U)
    if name == "tang":
        return tang(X, V, U)
    if name == "wl":
        return wl(X, V, U)
    if name == "gc":
        return gc(X, U)
    if name == "kwon2":
        return kwon2(X, V, U, m)
    raise ValueError(f"unknown index {name!r}")


@dataclass(frozen=True)
class CviReport:
    """Values, directions and derived count rankings for a set of indexes.

    `values[name][c]` is None where the evaluation was degenerate; those
    counts are listed in `degenerate[name]` and excluded from the ranking.
    """

    values: dict[str, dict[int, float | None]]
    directions: dict[str, str]
    rankings: dict[str, tuple[int, ...]]
    degenerate: dict[str, tuple[int, ...]]


def rank_counts(values: dict[int, float], direction: str) -> tuple[int, ...]:
    """Order counts best-first for the given direction; ties prefer smaller c."""
    if direction not in ("min", "max"):
        raise ValueError(f"direction must be 'min' or 'max', got {direction!r}")
    sign = 1.0 if direction == "min" else -1.0
    return tuple(sorted(values, key=lambda c: (sign * values[c], c)))


def compute_all(X, models, m: float, indexes=REFERENCE_INDEXES) -> CviReport:
    """Score every selected reference index at every fitted count.

    `models` maps counts to fitted clusterers exposing `cluster_centers_`
    and `membership_`.  Degenerate evaluations are flagged per count and
    left out of that index's ranking.
    """
    X = check_data(X)
    names = list(indexes)
    for name in names:
        if name not in REFERENCE_INDEXES:
            raise ValueError(f"unknown index {name!r}; choose from {REFERENCE_INDEXES}")
    counts = sorted(models)
    values: dict[str, dict[int, float | None]] = {}
    rankings: dict[str, tuple[int, ...]] = {}
    degenerate: dict[str, tuple[int, ...]] = {}
    for name in names:
        per_c: dict[int, float | None] = {}
        bad = []
        for c in counts:
            try:
                per_c[c] = _evaluate(name, X, models[c], m)
            except DegeneracyError:
                per_c[c] = None
                bad.append(c)
        values[name] = per_c
        degenerate[name] = tuple(bad)
        usable = {c: v for c, v in per_c.items() if v is not None}
        rankings[name] = rank_counts(usable, DIRECTIONS[name])
    return CviReport(values=values,
                     directions={name: DIRECTIONS[name] for name in names},
                     rankings=rankings,
                     degenerate=degenerate)
