"""Cluster-count scan: fit FCM across counts and rank them with validity indexes."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from ._validation import as_seed_sequence, check_data, child_seed
from .exceptions import DegeneracyError
from .fcm import FuzzyCMeans
from .indexes import DIRECTIONS, REFERENCE_INDEXES, compute_all
from .wp import default_gamma, wp_index, wpc_series

ALL_INDEXES = ("wp",) + REFERENCE_INDEXES


class ClusterCountScan(BaseEstimator):
    """Fit FCM for a range of cluster counts and rank the counts.

    Parameters
    ----------
    cmin, cmax : int, default=2 and 10
        Candidate counts, inclusive.  The correlation-based index also
        needs fits one count past cmax (and one below cmin when cmin > 2),
        which the scan handles internally.
    m : float, default=2.0
        FCM fuzziness exponent.
    gamma : float or None, default=None
        Centroid-blend exponent for the correlation curve; None means
        7 * m**2 / 4.
    indexes : sequence of str, default=("wp", "xb", "pbm", "tang", "wl", "gc", "kwon2")
        Which indexes to evaluate; order is preserved in the outputs.
    wpc1_mode : {"sd", "zero"}, default="sd"
        Baseline convention for the count-1 entry of the correlation curve.
    n_init, max_iter, tol : FCM fitting controls (see FuzzyCMeans).
    random_state : int, SeedSequence or None
        Every count draws its own child seed, so a scan is reproducible
        bit for bit and a count's fit does not depend on which other
        counts were requested.

    Attributes
    ----------
    models_ : dict mapping count -> fitted FuzzyCMeans
    wpc_series_ : WpcSeries (when "wp" is selected)
    wp_report_ : WpReport (when "wp" is selected)
    cvi_report_ : CviReport over the selected reference indexes
    rankings_ : dict mapping index name -> tuple of counts, best first
    best_n_clusters_ : top count of the first selected index's ranking,
        or None if that ranking is empty
    """

    def __init__(self, cmin: int = 2, cmax: int = 10, *, m: float = 2.0,
                 gamma: float | None = None, indexes=ALL_INDEXES,
                 wpc1_mode: str = "sd", n_init: int = 20, max_iter: int = 200,
                 tol: float = 1e-8, random_state=None):
        self.cmin = cmin
        self.cmax = cmax
        self.m = m
        self.gamma = gamma
        self.indexes = indexes
        self.wpc1_mode = wpc1_mode
        self.n_init = n_init
        self.max_iter = max_iter
        self.tol = tol
        self.random_state = random_state

    def fit(self, X, y=None):
        X = check_data(X)
        n = X.shape[0]
        names = list(self.indexes)
        if not names:
            raise ValueError("indexes must name at least one index")
        for name in names:
            if name not in ALL_INDEXES:
                raise ValueError(f"unknown index {name!r}; choose from {ALL_INDEXES}")
        if not 2 <= self.cmin <= self.cmax:
            raise ValueError(f"need 2 <= cmin <= cmax, got cmin={self.cmin}, cmax={self.cmax}")
        with_wp = "wp" in names
        top = self.cmax + 1 if with_wp else self.cmax
        if top > n:
            raise ValueError(f"cmax={self.cmax} too large for n={n}")
        gamma = default_gamma(self.m) if self.gamma is None else float(self.gamma)
        if not gamma > 0.0:
            raise ValueError(f"gamma must be > 0, got {gamma}")

        lb = self.cmin
        if with_wp:
            lb = 2 if self.cmin == 2 else self.cmin - 1
        ss = as_seed_sequence(self.random_state)
        self.models_ = {}
        for c in range(lb, top + 1):
            model = FuzzyCMeans(n_clusters=c, m=self.m, max_iter=self.max_iter,
                                tol=self.tol, n_init=self.n_init,
                                random_state=child_seed(ss, c))
            self.models_[c] = model.fit(X)

        self.rankings_ = {}
        if with_wp:
            self.wpc_series_ = wpc_series(X, self.models_, self.cmin, self.cmax,
                                          gamma, self.wpc1_mode)
            self.wp_report_ = wp_index(self.wpc_series_)
            self.rankings_["wp"] = () if self.wp_report_.degenerate else self.wp_report_.ranking
        reference = [name for name in names if name != "wp"]
        scored = {c: self.models_[c] for c in range(self.cmin, self.cmax + 1)}
        self.cvi_report_ = compute_all(X, scored, self.m, indexes=reference)
        for name in reference:
            self.rankings_[name] = self.cvi_report_.rankings[name]
        self.rankings_ = {name: self.rankings_[name] for name in names}

        first = self.rankings_[names[0]]
        self.best_n_clusters_ = first[0] if first else None
        self.gamma_ = gamma
        self.n_features_in_ = X.shape[1]
        return self

    def require_any_ranking(self) -> None:
        """Raise DegeneracyError when every selected index came out empty."""
        if all(not ranking for ranking in self.rankings_.values()):
            raise DegeneracyError("every selected index was degenerate on this data")
