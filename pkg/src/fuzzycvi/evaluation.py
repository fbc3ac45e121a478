"""Benchmark protocols: accuracy gating, rank scores, sensitivity studies."""

from __future__ import annotations

import json
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from ._validation import as_seed_sequence, check_labels, check_membership, child_seed
from .data import MixtureSpec, generate_mixture, load_csv, load_mixture_spec, normalize_features
from .scan import ALL_INDEXES, ClusterCountScan
from .wp import wp_index, wpc_series

GATE_THRESHOLDS = {"artificial": 0.75, "real_world": 0.70}

SENSITIVITY_MODES = ("regenerate", "refit")


def clustering_accuracy(memberships, labels) -> float:
    """Fraction of points whose hardened cluster matches its class under the
    best cluster-to-class bijection.

    Hardening takes each row's largest membership (ties -> lowest index);
    the bijection maximizes the matched count, so the value is invariant
    to relabeling clusters or classes.  The number of clusters must equal
    the number of distinct labels.
    """
    U = check_membership(memberships)
    y = check_labels(labels, n_samples=U.shape[0])
    classes, y_codes = np.unique(y, return_inverse=True)
    if classes.size != U.shape[1]:
        raise ValueError(
            f"{U.shape[1]} clusters vs {classes.size} distinct labels; accuracy needs a bijection")
    hard = U.argmax(axis=1)
    table = np.zeros((classes.size, U.shape[1]))
    np.add.at(table, (y_codes, hard), 1.0)
    rows, cols = linear_sum_assignment(table, maximize=True)
    return float(table[rows, cols].sum()) / U.shape[0]


def gate(accuracy: float, kind: str) -> bool:
    """Quality gate: True when the run is usable.

    Fails only when accuracy is strictly below 0.75 for "artificial" data
    or 0.70 for "real_world" data.
    """
    if kind not in GATE_THRESHOLDS:
        raise ValueError(f"kind must be one of {tuple(GATE_THRESHOLDS)}, got {kind!r}")
    if not 0.0 <= accuracy <= 1.0:
        raise ValueError(f"accuracy must lie in [0, 1], got {accuracy}")
    return not accuracy < GATE_THRESHOLDS[kind]


def cmax_rule(c_true: int) -> int:
    """Search ceiling as a step function of the true count."""
    if not 2 <= c_true <= 18:
        raise ValueError(f"c_true must lie in [2, 18], got {c_true}")
    if c_true <= 8:
        return 10
    if c_true <= 13:
        return 15
    return 20


def rank_of(ranking, c_true: int) -> int | None:
    """1-based position of c_true in a ranking, or None when absent."""
    ranking = list(ranking)
    if c_true in ranking:
        return ranking.index(c_true) + 1
    return None


def r_score(ranking, c_first: int, c_second: int) -> dict[str, int]:
    """Two-level rank score for data with a primary and a secondary count.

    The primary count earns 3/2/1 at rank 1/2/3; the secondary earns 2 at
    rank 2 and 1 at ranks 1 or 3.  Anything else earns 0.  Returns the two
    parts and their total (0..5).
    """
    if c_first == c_second:
        raise ValueError("primary and secondary counts must differ")
    sc1 = {1: 3, 2: 2, 3: 1}.get(rank_of(ranking, c_first), 0)
    r2 = rank_of(ranking, c_second)
    sc2 = 2 if r2 == 2 else (1 if r2 in (1, 3) else 0)
    return {"sc1": sc1, "sc2": sc2, "total": sc1 + sc2}


def i_score(ranking, acceptable) -> float:
    """Half-step score in [0, 3] for how much of the top three is acceptable.

    Scores by which of the first three ranked counts fall in `acceptable`:
    all three 3; first two 2.5; first and third 2; first only or last two
    1.5; second only 1; third only 0.5; none 0.
    """
    acceptable = set(acceptable)
    if not acceptable:
        raise ValueError("acceptable set must be non-empty")
    top = list(ranking)[:3]
    hits = tuple(c in acceptable for c in top) + (False,) * (3 - len(top))
    table = {
        (True, True, True): 3.0,
        (True, True, False): 2.5,
        (True, False, True): 2.0,
        (True, False, False): 1.5,
        (False, True, True): 1.5,
        (False, True, False): 1.0,
        (False, False, True): 0.5,
        (False, False, False): 0.0,
    }
    return table[hits]


# ---------------------------------------------------------------------------
# Sensitivity study
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SensitivityEntry:
    """Spread of the correlation-based score for one (dataset, gamma) cell."""

    dataset: int
    gamma: float
    sd_by_c: dict[int, float]
    average_sd: float
    modal_rank: int | None
    modal_rank_count: int


@dataclass(frozen=True)
class SensitivityReport:
    mode: str
    m: float
    repeats: int
    entries: tuple[SensitivityEntry, ...]

    def entry(self, dataset: int, gamma: float) -> SensitivityEntry:
        for e in self.entries:
            if e.dataset == dataset and e.gamma == gamma:
                return e
        raise KeyError(f"no entry for dataset={dataset}, gamma={gamma}")


def sensitivity_study(specs, gammas, repeats: int, m: float, *, mode: str = "refit",
                      cmin: int = 2, cmax: int = 10, restarts: int = 1,
                      max_iter: int = 200, tol: float = 1e-8, wpc1_mode: str = "sd",
                      normalize: str = "standardize", base_seed: int = 0) -> SensitivityReport:
    """Measure how the blend exponent changes the stability of the score.

    For every spec and repeat, data is drawn fresh ("regenerate") or fixed
    with a fresh FCM randomization ("refit"), the count scan is fitted
    once, and the final score is computed for each gamma reusing those
    fits.  Each (dataset, gamma) cell reports the per-count sample SD of
    the score over repeats, the average SD across counts, and the modal
    rank of the true count with its frequency.
    """
    if mode not in SENSITIVITY_MODES:
        raise ValueError(f"mode must be one of {SENSITIVITY_MODES}, got {mode!r}")
    if repeats < 2:
        raise ValueError(f"repeats must be >= 2, got {repeats}")
    gammas = [float(g) for g in gammas]
    if not gammas:
        raise ValueError("gammas must be non-empty")
    for g in gammas:
        if not g > 0.0:
            raise ValueError(f"gamma values must be > 0, got {g}")
    specs = list(specs)
    ss = as_seed_sequence(base_seed)

    entries = []
    for si, spec in enumerate(specs):
        if not isinstance(spec, MixtureSpec):
            raise ValueError(f"spec {si} is not a MixtureSpec")
        c_true = spec.n_labels
        if mode == "refit":
            X, _ = generate_mixture(spec, seed=child_seed(ss, 0, si))
            X = normalize_features(X, normalize)
        lb = 2 if cmin == 2 else cmin - 1
        scores: dict[float, list[dict[int, float]]] = {g: [] for g in gammas}
        ranks: dict[float, list[int | None]] = {g: [] for g in gammas}
        for rep in range(repeats):
            if mode == "regenerate":
                X, _ = generate_mixture(spec, seed=child_seed(ss, 0, si, rep))
                X = normalize_features(X, normalize)
            models = _fit_models(X, lb, cmax + 1, m, restarts, max_iter, tol,
                                 child_seed(ss, 1, si, rep))
            for g in gammas:
                series = wpc_series(X, models, cmin, cmax, g, wpc1_mode)
                report = wp_index(series)
                scores[g].append(report.wp)
                ranks[g].append(rank_of(report.ranking, c_true))
        for g in gammas:
            per_c = {}
            for c in range(cmin, cmax + 1):
                vals = np.array([rep_scores[c] for rep_scores in scores[g]])
                per_c[c] = float(np.std(vals, ddof=1))
            avg = float(np.mean(list(per_c.values())))
            seen = [r for r in ranks[g] if r is not None]
            if seen:
                counts = Counter(seen)
                best = max(counts.items(), key=lambda kv: (kv[1], -kv[0]))
                modal, freq = best[0], best[1]
            else:
                modal, freq = None, 0
            entries.append(SensitivityEntry(dataset=si, gamma=g, sd_by_c=per_c,
                                            average_sd=avg, modal_rank=modal,
                                            modal_rank_count=freq))
    return SensitivityReport(mode=mode, m=m, repeats=repeats, entries=tuple(entries))


def _fit_models(X, c_lo, c_hi, m, restarts, max_iter, tol, seed):
    from .fcm import FuzzyCMeans

    models = {}
    for c in range(c_lo, c_hi + 1):
        models[c] = FuzzyCMeans(n_clusters=c, m=m, max_iter=max_iter, tol=tol,
                                n_init=restarts, random_state=child_seed(seed, c)).fit(X)
    return models


# ---------------------------------------------------------------------------
# Benchmark harness
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DatasetOutcome:
    """Everything the harness learned about one manifest dataset."""

    name: str
    kind: str
    c_true: int
    cmax: int
    accuracy: float
    gate_passed: bool
    ranks: dict[str, int | None] = field(default_factory=dict)
    r_scores: dict[str, dict[str, int]] = field(default_factory=dict)
    i_scores: dict[str, float] = field(default_factory=dict)
    rankings: dict[str, tuple[int, ...]] = field(default_factory=dict)


@dataclass(frozen=True)
class BenchmarkScore:
    """Per-index aggregates over the gated-in datasets of a manifest run."""

    outcomes: tuple[DatasetOutcome, ...]
    correct_counts: dict[str, int]
    average_ranks: dict[str, float | None]
    r_score_totals: dict[str, int]
    i_score_totals: dict[str, float]
    n_gated_out: int


def _load_manifest_dataset(entry, i, base_dir):
    where = f"manifest dataset {i}"
    if not isinstance(entry, dict):
        raise ValueError(f"{where}: expected an object")
    for key in ("name", "kind", "source", "c_true"):
        if key not in entry:
            raise ValueError(f"{where}: missing field '{key}'")
    kind = entry["kind"]
    if kind not in GATE_THRESHOLDS:
        raise ValueError(f"{where}: kind must be one of {tuple(GATE_THRESHOLDS)}, got {kind!r}")
    source = entry["source"]
    if "type" not in source:
        raise ValueError(f"{where}: missing field 'source.type'")
    stype = source["type"]
    if stype == "mixture":
        if "spec" in source:
            from .data import mixture_spec_from_dict

            spec = mixture_spec_from_dict(source["spec"])
        elif "path" in source:
            spec = load_mixture_spec(base_dir / source["path"])
        else:
            raise ValueError(f"{where}: mixture source needs 'spec' or 'path'")
        return entry, spec, None
    if stype == "csv":
        if "path" not in source:
            raise ValueError(f"{where}: missing field 'source.path'")
        if "label_column" not in source:
            raise ValueError(f"{where}: missing field 'source.label_column'")
        X, y = load_csv(base_dir / source["path"], label_column=source["label_column"])
        if y is None:
            raise ValueError(f"{where}: label column produced no labels")
        return entry, None, (X, y)
    raise ValueError(f"{where}: unknown source type {stype!r}")


def run_benchmark(manifest, *, m: float = 2.0, gamma: float | None = None,
                  indexes=ALL_INDEXES, wpc1_mode: str = "sd",
                  normalize: str = "standardize", restarts: int = 20,
                  max_iter: int = 200, tol: float = 1e-8, seed: int = 0,
                  threads: int = 1, base_dir=None) -> BenchmarkScore:
    """Run the full protocol over a manifest of labeled datasets.

    Per dataset: materialize the data, normalize, derive the search
    ceiling from the true count, fit the count scan, gate on accuracy at
    the true count, then record each index's rank of the true count plus
    the optional two-level and acceptable-set scores.  Dataset jobs carry
    deterministic child seeds, so thread count does not change results.
    """
    from pathlib import Path

    if isinstance(manifest, (str, Path)):
        base_dir = Path(manifest).parent if base_dir is None else Path(base_dir)
        with open(manifest, encoding="utf-8") as fh:
            try:
                manifest = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ValueError(f"manifest is not valid JSON: {exc}") from exc
    base_dir = Path(".") if base_dir is None else Path(base_dir)
    if "datasets" not in manifest:
        raise ValueError("manifest: missing field 'datasets'")
    rows = manifest["datasets"]
    if not rows:
        raise ValueError("manifest: 'datasets' is empty")
    names = list(indexes)
    ss = as_seed_sequence(seed)

    loaded = [_load_manifest_dataset(entry, i, base_dir) for i, entry in enumerate(rows)]

    def run_one(i):
        entry, spec, ready = loaded[i]
        c_true = int(entry["c_true"])
        cmax = cmax_rule(c_true)
        job_seed = child_seed(ss, i)
        if spec is not None:
            X, y = generate_mixture(spec, seed=child_seed(job_seed, 0))
        else:
            X, y = ready
        X = normalize_features(X, normalize)
        scan = ClusterCountScan(cmin=2, cmax=cmax, m=m, gamma=gamma, indexes=names,
                                wpc1_mode=wpc1_mode, n_init=restarts, max_iter=max_iter,
                                tol=tol, random_state=child_seed(job_seed, 1)).fit(X)
        acc = clustering_accuracy(scan.models_[c_true].membership_, y)
        passed = gate(acc, entry["kind"])
        outcome = DatasetOutcome(
            name=str(entry["name"]), kind=entry["kind"], c_true=c_true, cmax=cmax,
            accuracy=acc, gate_passed=passed,
            ranks={name: rank_of(scan.rankings_[name], c_true) for name in names},
            r_scores={name: r_score(scan.rankings_[name], c_true, int(entry["c_second"]))
                      for name in names} if "c_second" in entry else {},
            i_scores={name: i_score(scan.rankings_[name], entry["acceptable"])
                      for name in names} if "acceptable" in entry else {},
            rankings={name: scan.rankings_[name] for name in names},
        )
        return outcome

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(run_one, range(len(loaded))))
    else:
        outcomes = [run_one(i) for i in range(len(loaded))]

    usable = [o for o in outcomes if o.gate_passed]
    correct = {}
    average = {}
    r_totals = {}
    i_totals = {}
    for name in names:
        ranks = [o.ranks[name] for o in usable if o.ranks.get(name) is not None]
        correct[name] = sum(1 for r in ranks if r == 1)
        average[name] = float(np.mean(ranks)) if ranks else None
        r_totals[name] = sum(o.r_scores[name]["total"] for o in usable if o.r_scores)
        i_totals[name] = float(sum(o.i_scores[name] for o in usable if o.i_scores))
    return BenchmarkScore(outcomes=tuple(outcomes), correct_counts=correct,
                          average_ranks=average, r_score_totals=r_totals,
                          i_score_totals=i_totals,
                          n_gated_out=len(outcomes) - len(usable))
