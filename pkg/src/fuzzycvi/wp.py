"""Correlation-based cluster-count scoring (WPC curve, WP index).

The score of a candidate count c compares two condensed pair-distance
vectors over the same data: the observed distances, and the distances
between per-point blends of the fitted centroids.  A high correlation
means the partition's geometry echoes the data's geometry.  Improvement
ratios along the resulting curve over c turn it into a ranking of counts,
with runner-up structure preserved.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import pdist

from ._validation import check_data, check_membership
from .exceptions import DegeneracyError, DegeneracyWarning

# Pairs are streamed through the correlation accumulator in fixed-size
# blocks so the reduction order (hence the result) never depends on the
# caller's chunking.
PAIR_CHUNK = 1 << 16

WPC1_MODES = ("zero", "sd")


def pairwise_distances(X) -> np.ndarray:
    """Condensed Euclidean pair distances in row-major (i < j) order."""
    X = check_data(X, min_rows=2)
    return pdist(X)


class PairCorrelation:
    """Streaming Pearson correlation over paired value chunks.

    Keeps centered first and second (co)moments and merges chunk
    statistics, so a single pass over arbitrarily many pairs needs O(1)
    memory and stays numerically stable even when the values share a
    large common offset.
    """

    __slots__ = ("n", "mean_x", "mean_y", "sxx", "syy", "sxy")

    def __init__(self):
        self.n = 0
        self.mean_x = 0.0
        self.mean_y = 0.0
        self.sxx = 0.0
        self.syy = 0.0
        self.sxy = 0.0

    def update(self, x, y) -> None:
        """Fold one aligned chunk of x/y values into the running moments."""
        x = np.asarray(x, dtype=float).ravel()
        y = np.asarray(y, dtype=float).ravel()
        if x.shape != y.shape:
            raise ValueError(f"chunk shapes differ: {x.shape} vs {y.shape}")
        for start in range(0, x.size, PAIR_CHUNK):
            self._merge_chunk(x[start:start + PAIR_CHUNK], y[start:start + PAIR_CHUNK])

    def _merge_chunk(self, x, y):
        k = x.size
        if k == 0:
            return
        mx = float(x.mean())
        my = float(y.mean())
        dx = x - mx
        dy = y - my
        sxx = float(dx @ dx)
        syy = float(dy @ dy)
        sxy = float(dx @ dy)
        if self.n == 0:
            self.n, self.mean_x, self.mean_y = k, mx, my
            self.sxx, self.syy, self.sxy = sxx, syy, sxy
            return
        n1 = self.n
        total = n1 + k
        delta_x = mx - self.mean_x
        delta_y = my - self.mean_y
        f = n1 * k / total
        self.sxx += sxx + delta_x * delta_x * f
        self.syy += syy + delta_y * delta_y * f
        self.sxy += sxy + delta_x * delta_y * f
        self.mean_x += delta_x * k / total
        self.mean_y += delta_y * k / total
        self.n = total

    def result(self) -> tuple[float, bool]:
        """(correlation clamped to [-1, 1], degenerate flag)."""
        if self.n < 2:
            return 0.0, True
        sxx = max(self.sxx, 0.0)
        syy = max(self.syy, 0.0)
        if sxx == 0.0 or syy == 0.0:
            return 0.0, True
        r = self.sxy / math.sqrt(sxx * syy)
        return min(1.0, max(-1.0, r)), False


def pearson(x, y) -> float:
    """Pearson correlation of two aligned vectors, clamped to [-1, 1].

    Zero variance on either side returns 0 and issues a
    DegeneracyWarning.
    """
    acc = PairCorrelation()
    acc.update(x, y)
    value, degenerate = acc.result()
    if degenerate:
        warnings.warn("correlation of a zero-variance vector reported as 0", DegeneracyWarning)
    return value


def adjusted_centroids(memberships, centroids, gamma: float) -> np.ndarray:
    """Per-point convex blends of the centroids with weights memberships**gamma.

    Each row is normalized by its largest membership before exponentiation,
    which leaves the blend unchanged but keeps very large gamma from
    underflowing every weight in the row.
    """
    U = check_membership(memberships)
    V = check_data(centroids, min_rows=1, name="centroids")
    if U.shape[1] != V.shape[0]:
        raise ValueError(f"memberships have {U.shape[1]} columns but there are {V.shape[0]} centroids")
    if not gamma > 0.0:
        raise ValueError(f"gamma must be > 0, got {gamma}")
    ratio = U / U.max(axis=1, keepdims=True)
    W = ratio ** float(gamma)
    return (W @ V) / W.sum(axis=1, keepdims=True)


def default_gamma(m: float) -> float:
    """Blend exponent used when none is given: 7 * m**2 / 4."""
    if m <= 1.0:
        raise ValueError(f"m must be > 1, got {m}")
    return 7.0 * m * m / 4.0


def _paired_distance_correlation(A, B) -> tuple[float, bool]:
    """Pearson correlation of the condensed pair distances of A and B.

    Pairs are visited row-major (i < j) and streamed, so the two length
    n*(n-1)/2 vectors are never materialized.
    """
    acc = PairCorrelation()
    n = A.shape[0]
    for i in range(n - 1):
        da = np.sqrt(((A[i + 1:] - A[i]) ** 2).sum(axis=1))
        db = np.sqrt(((B[i + 1:] - B[i]) ** 2).sum(axis=1))
        acc.update(da, db)
    return acc.result()


def _wpc_impl(X, centroids, memberships, gamma) -> tuple[float, bool]:
    X = check_data(X)
    V = check_data(centroids, min_rows=1, name="centroids")
    U = check_membership(memberships, n_samples=X.shape[0], n_clusters=V.shape[0])
    if V.shape[0] < 2:
        raise ValueError(f"need at least 2 centroids, got {V.shape[0]}")
    if V.shape[1] != X.shape[1]:
        raise ValueError(f"X has {X.shape[1]} features but centroids have {V.shape[1]}")
    O = adjusted_centroids(U, V, gamma)
    return _paired_distance_correlation(X, O)


def wpc(X, centroids, memberships, gamma: float) -> float:
    """Correlation between observed pair distances and blended-centroid pair distances.

    Lies in [-1, 1].  If either distance vector has zero variance the
    value is 0 and a DegeneracyWarning is issued.
    """
    value, degenerate = _wpc_impl(X, centroids, memberships, gamma)
    if degenerate:
        warnings.warn("zero-variance pair distances; correlation reported as 0", DegeneracyWarning)
    return value


def _wpc_at_one_impl(X, mode) -> tuple[float, bool]:
    X = check_data(X)
    if mode not in WPC1_MODES:
        raise ValueError(f"mode must be one of {WPC1_MODES}, got {mode!r}")
    if mode == "zero":
        return 0.0, False
    d = np.sqrt(((X - X.mean(axis=0)) ** 2).sum(axis=1))
    spread = float(d.max() - d.min())
    if spread == 0.0:
        return 0.0, True
    return float(np.std(d, ddof=1) / spread), False


def wpc_at_one(X, mode: str = "sd") -> float:
    """Single-cluster baseline for the correlation curve.

    Mode "zero" pins it at 0.  Mode "sd" uses the sample standard
    deviation of the distances to the grand centroid divided by their
    range; a zero range degenerates to 0 with a DegeneracyWarning.
    """
    value, degenerate = _wpc_at_one_impl(X, mode)
    if degenerate:
        warnings.warn("all points equidistant from the grand centroid; baseline is 0", DegeneracyWarning)
    return value


@dataclass(frozen=True)
class WpcSeries:
    """Correlation curve over cluster counts cmin-1 .. cmax+1.

    `values` maps each covered count to its correlation (the count-1 entry,
    when present, comes from `wpc_at_one`).  `degenerate` lists counts whose
    value fell back to the 0 convention.
    """

    values: dict[int, float]
    mode_used: str | None = None
    degenerate: frozenset[int] = field(default_factory=frozenset)

    def __getitem__(self, c: int) -> float:
        return self.values[c]

    @property
    def cmin(self) -> int:
        return min(self.values) + 1

    @property
    def cmax(self) -> int:
        return max(self.values) - 1


def wpc_series(X, models, cmin: int, cmax: int, gamma: float,
               wpc1_mode: str = "sd") -> WpcSeries:
    """Evaluate the correlation curve from fitted models.

    `models` maps cluster counts to fitted clusterers exposing
    `cluster_centers_` and `membership_`.  Counts max(2, cmin-1) .. cmax+1
    must all be present; when cmin == 2 the count-1 entry comes from
    `wpc_at_one` instead of a model.
    """
    X = check_data(X)
    n = X.shape[0]
    if not 2 <= cmin <= cmax:
        raise ValueError(f"need 2 <= cmin <= cmax, got cmin={cmin}, cmax={cmax}")
    if cmax > n - 1:
        raise ValueError(f"cmax={cmax} too large for n={n} (needs cmax <= n - 1)")
    lb = 2 if cmin == 2 else cmin - 1
    values: dict[int, float] = {}
    degenerate = set()
    mode_used = None
    if cmin == 2:
        mode_used = wpc1_mode
        values[1], bad = _wpc_at_one_impl(X, wpc1_mode)
        if bad:
            degenerate.add(1)
    for c in range(lb, cmax + 2):
        if c not in models:
            raise ValueError(f"missing fitted model for c={c}")
        model = models[c]
        V = np.asarray(model.cluster_centers_, dtype=float)
        if V.shape[0] != c:
            raise ValueError(f"model registered for c={c} has {V.shape[0]} centroids")
        values[c], bad = _wpc_impl(X, V, model.membership_, gamma)
        if bad:
            degenerate.add(c)
    return WpcSeries(values=values, mode_used=mode_used, degenerate=frozenset(degenerate))


def _series_values(series) -> dict[int, float]:
    if isinstance(series, WpcSeries):
        return series.values
    return {int(c): float(v) for c, v in dict(series).items()}


def _guarded_ratio(num: float, den: float, at: int) -> float:
    if den != 0.0:
        return num / den
    if num == 0.0:
        return 0.0
    raise DegeneracyError(f"correlation curve reaches 1 at c={at}; improvement ratio undefined")


def wpi(series, c: int) -> tuple[float, float]:
    """Improvement ratio and improvement difference of the curve at count c.

    The first value may be +inf or -inf when the curve stops improving
    above c (the sign follows the numerator; 0/0 gives 0).  Needs the
    series to cover c-1, c and c+1.
    """
    s = _series_values(series)
    for need in (c - 1, c, c + 1):
        if need not in s:
            raise ValueError(f"series does not cover c={need}")
    rise = s[c] - s[c - 1]
    num = rise * (1.0 - s[c])
    den = max(0.0, s[c + 1] - s[c]) * (1.0 - s[c - 1])
    if den > 0.0:
        ratio = num / den
    elif num > 0.0:
        ratio = math.inf
    elif num < 0.0:
        ratio = -math.inf
    else:
        ratio = 0.0
    diff = (_guarded_ratio(rise, 1.0 - s[c - 1], c - 1)
            - _guarded_ratio(s[c + 1] - s[c], 1.0 - s[c], c))
    return ratio, diff


@dataclass(frozen=True)
class WpReport:
    """Final per-count scores, the substitution case used, and the ranking."""

    wpi1: dict[int, float]
    wpi2: dict[int, float]
    wp: dict[int, float]
    ranking: tuple[int, ...]
    case_used: str
    degenerate: bool = False

    @property
    def best(self) -> int:
        return self.ranking[0]


def wp_index(series) -> WpReport:
    """Turn a correlation curve into finite per-count scores and a ranking.

    Counts are scored by the improvement ratio; infinities are replaced
    by the running finite extremes, shifted by the improvement difference
    when any +inf is present, and by the difference alone when no finite
    ratio exists.  Larger is better; ties rank the smaller count first.
    """
    values = _series_values(series)
    keys = sorted(values)
    if len(keys) < 3:
        raise ValueError("series must cover at least three consecutive counts")
    if keys != list(range(keys[0], keys[-1] + 1)):
        raise ValueError("series counts must be consecutive")
    cmin, cmax = keys[0] + 1, keys[-1] - 1
    wpi1: dict[int, float] = {}
    wpi2: dict[int, float] = {}
    for c in range(cmin, cmax + 1):
        wpi1[c], wpi2[c] = wpi(values, c)
    finite = [v for v in wpi1.values() if math.isfinite(v)]
    if not finite:
        case = "case3"
        wp = dict(wpi2)
    elif any(v == math.inf for v in wpi1.values()):
        case = "case2"
        lo, hi = min(finite), max(finite)
        wp = {}
        for c, v in wpi1.items():
            if v == -math.inf:
                base = lo
            elif v == math.inf:
                base = hi
            else:
                base = v
            wp[c] = base + wpi2[c]
    else:
        case = "case1"
        lo = min(finite)
        wp = {c: (lo if v == -math.inf else v) for c, v in wpi1.items()}
    ranking = tuple(sorted(wp, key=lambda c: (-wp[c], c)))
    if isinstance(series, WpcSeries):
        fitted = [c for c in series.values if c >= 2]
        degenerate = bool(fitted) and all(c in series.degenerate for c in fitted)
    else:
        degenerate = False
    return WpReport(wpi1=wpi1, wpi2=wpi2, wp=wp, ranking=ranking,
                    case_used=case, degenerate=degenerate)
