"""Command-line interface: generate, fit, cvi, rank, bench, sensitivity, image.

Exit codes: 0 on success, 2 on input or configuration errors, 3 when the
requested computation was degenerate end to end.  Reports embed the full
resolved configuration and are byte-identical for identical command lines
and seeds.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from ._validation import child_seed
from .data import (NORMALIZE_MODES, generate_mixture, image_to_points, load_csv,
                   load_mixture_spec, normalize_features, save_csv, write_ppm)
from .evaluation import run_benchmark, sensitivity_study
from .exceptions import DegeneracyError
from .fcm import FuzzyCMeans
from .indexes import DIRECTIONS
from .scan import ALL_INDEXES, ClusterCountScan
from .wp import WPC1_MODES, default_gamma, wp_index

SCHEMA_VERSION = 1

IMAGE_TARGET_W = 120
IMAGE_TARGET_H = 80


# ---------------------------------------------------------------------------
# Small serialization helpers
# ---------------------------------------------------------------------------

def _jsonable(obj):
    """Make reports JSON-safe: numpy -> python, non-finite floats -> strings."""
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        obj = float(obj)
    if isinstance(obj, float):
        if math.isnan(obj):
            return "nan"
        if obj == math.inf:
            return "inf"
        if obj == -math.inf:
            return "-inf"
    return obj


def _write_json(path, payload) -> None:
    text = json.dumps(_jsonable(payload), indent=2)
    Path(path).write_text(text + "\n", encoding="utf-8")


def _write_csv(path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if value == math.inf:
            return "inf"
        if value == -math.inf:
            return "-inf"
        return repr(value)
    return str(value)


# ---------------------------------------------------------------------------
# Argument plumbing
# ---------------------------------------------------------------------------

def _comma_list(text, cast, what):
    try:
        return [cast(part.strip()) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad {what} list {text!r}: {exc}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fuzzycvi",
        description="Fuzzy c-means cluster-count selection with validity indexes.")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output-dir", default=".", help="directory for report files")
    common.add_argument("--m", type=float, default=2.0, help="FCM fuzziness exponent (> 1)")
    common.add_argument("--gamma", type=float, default=None,
                        help="centroid-blend exponent; defaults to 7*m^2/4")
    common.add_argument("--cmin", type=int, default=2, help="smallest candidate count")
    common.add_argument("--cmax", type=int, default=10, help="largest candidate count")
    common.add_argument("--restarts", type=int, default=20, help="FCM restarts per fit")
    common.add_argument("--seed", type=int, default=None,
                        help="base seed (default 0; 'generate' falls back to the spec's seed)")
    common.add_argument("--indexes", default=",".join(ALL_INDEXES),
                        help="comma-separated subset of " + ",".join(ALL_INDEXES))
    common.add_argument("--wpc1-mode", choices=list(WPC1_MODES), default="sd",
                        help="count-1 baseline of the correlation curve")
    common.add_argument("--normalize", choices=list(NORMALIZE_MODES), default="standardize",
                        help="feature rescaling applied before fitting")
    common.add_argument("--top-k", type=int, default=3, help="ranked counts to print")
    common.add_argument("--threads", type=int, default=1,
                        help="parallel dataset jobs in bench (results are identical)")

    p = sub.add_parser("generate", parents=[common], help="sample a mixture spec to CSV")
    p.add_argument("--input", required=True, help="mixture spec JSON")

    p = sub.add_parser("fit", parents=[common], help="fit FCM at one count")
    p.add_argument("--input", required=True, help="dataset CSV")
    p.add_argument("--c", type=int, required=True, help="number of clusters")
    p.add_argument("--label-column", default=None, help="label column name or 0-based index")

    p = sub.add_parser("cvi", parents=[common], help="score counts with the selected indexes")
    p.add_argument("--input", required=True, help="dataset CSV")
    p.add_argument("--label-column", default=None, help="label column name or 0-based index")

    p = sub.add_parser("rank", parents=[common], help="print the top counts per index")
    p.add_argument("--input", default=None, help="dataset CSV")
    p.add_argument("--label-column", default=None, help="label column name or 0-based index")
    p.add_argument("--wpc-series", default=None,
                   help="test hook: comma-separated correlation curve starting at "
                        "count cmin-1 (count 1 when cmin is 2); skips fitting")

    p = sub.add_parser("bench", parents=[common], help="run a benchmark manifest")
    p.add_argument("--input", required=True, help="benchmark manifest JSON")

    p = sub.add_parser("sensitivity", parents=[common],
                       help="stability of the correlation-based score across gamma")
    p.add_argument("--input", required=True, help="mixture spec JSON")
    p.add_argument("--gammas", required=True, help="comma-separated gamma values")
    p.add_argument("--repeats", type=int, default=30, help="repeats per gamma")
    p.add_argument("--mode", choices=["regenerate", "refit"], default="refit",
                   help="fresh data per repeat, or fixed data with fresh FCM seeds")

    p = sub.add_parser("image", parents=[common], help="cluster an image's pixel colors")
    p.add_argument("--input", required=True, help="PPM (P6) or PNG image")
    p.set_defaults(normalize="none")

    return parser


def _resolve(args, *, default_seed=0):
    if args.m <= 1.0:
        raise ValueError(f"--m must be > 1, got {args.m}")
    gamma = default_gamma(args.m) if args.gamma is None else args.gamma
    if not gamma > 0.0:
        raise ValueError(f"--gamma must be > 0, got {gamma}")
    if not 2 <= args.cmin <= args.cmax:
        raise ValueError(f"need 2 <= cmin <= cmax, got cmin={args.cmin} cmax={args.cmax}")
    if args.restarts < 1:
        raise ValueError(f"--restarts must be >= 1, got {args.restarts}")
    if args.top_k < 1:
        raise ValueError(f"--top-k must be >= 1, got {args.top_k}")
    if args.threads < 1:
        raise ValueError(f"--threads must be >= 1, got {args.threads}")
    indexes = _comma_list(args.indexes, str, "index")
    for name in indexes:
        if name not in ALL_INDEXES:
            raise ValueError(f"unknown index {name!r}; choose from {','.join(ALL_INDEXES)}")
    if not indexes:
        raise ValueError("--indexes must select at least one index")
    seed = default_seed if args.seed is None else args.seed
    outdir = Path(args.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    # output_dir stays out of the config block so identical runs into
    # different directories still produce byte-identical reports
    config = {
        "command": args.command,
        "input": getattr(args, "input", None),
        "m": args.m,
        "gamma": gamma,
        "cmin": args.cmin,
        "cmax": args.cmax,
        "restarts": args.restarts,
        "seed": seed,
        "indexes": indexes,
        "wpc1_mode": args.wpc1_mode,
        "normalize": args.normalize,
        "top_k": args.top_k,
        "threads": args.threads,
    }
    return config, gamma, seed, indexes, outdir


def _parse_label_column(raw):
    if raw is None:
        return None
    try:
        return int(raw)
    except ValueError:
        return raw


# ---------------------------------------------------------------------------
# Report assembly shared by cvi / rank / image
# ---------------------------------------------------------------------------

def _scan_payload(scan: ClusterCountScan, indexes) -> dict:
    payload = {}
    if "wp" in indexes:
        series = scan.wpc_series_
        payload["wpc"] = {
            "mode_used": series.mode_used,
            "values": {c: series.values[c] for c in sorted(series.values)},
            "degenerate": sorted(series.degenerate),
        }
        report = scan.wp_report_
        payload["wp"] = {
            "direction": DIRECTIONS["wp"],
            "case_used": report.case_used,
            "wpi1": {c: report.wpi1[c] for c in sorted(report.wpi1)},
            "wpi2": {c: report.wpi2[c] for c in sorted(report.wpi2)},
            "values": {c: report.wp[c] for c in sorted(report.wp)},
            "ranking": list(report.ranking),
            "degenerate": report.degenerate,
        }
    reference = [name for name in indexes if name != "wp"]
    if reference:
        cvi = scan.cvi_report_
        payload["indexes"] = {
            name: {
                "direction": cvi.directions[name],
                "values": {c: cvi.values[name][c] for c in sorted(cvi.values[name])},
                "ranking": list(cvi.rankings[name]),
                "degenerate": list(cvi.degenerate[name]),
            }
            for name in reference
        }
    payload["rankings"] = {name: list(scan.rankings_[name]) for name in indexes}
    payload["best_n_clusters"] = scan.best_n_clusters_
    return payload


def _values_rows(scan: ClusterCountScan, indexes):
    rows = []
    if "wp" in indexes:
        series = scan.wpc_series_
        for c in sorted(series.values):
            rows.append((c, "wpc", _cell(series.values[c])))
        for c in sorted(scan.wp_report_.wp):
            rows.append((c, "wp", _cell(scan.wp_report_.wp[c])))
    for name in indexes:
        if name == "wp":
            continue
        per_c = scan.cvi_report_.values[name]
        for c in sorted(per_c):
            rows.append((c, name, _cell(per_c[c])))
    return rows


def _ranking_rows(scan: ClusterCountScan, indexes):
    rows = []
    for name in indexes:
        ranking = scan.rankings_[name]
        for pos, c in enumerate(ranking, start=1):
            if name == "wp":
                value = scan.wp_report_.wp[c]
            else:
                value = scan.cvi_report_.values[name][c]
            rows.append((name, pos, c, _cell(value)))
    return rows


def _print_rankings(rankings, values, top_k) -> None:
    for name, ranking in rankings.items():
        if not ranking:
            print(f"{name}: (degenerate)")
            continue
        parts = [f"c={c} ({values[name][c]:.6g})" for c in ranking[:top_k]]
        print(f"{name}: " + ", ".join(parts))


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_generate(args) -> int:
    spec = load_mixture_spec(args.input)
    config, _, seed, _, outdir = _resolve(args, default_seed=spec.seed)
    X, y = generate_mixture(spec, seed=seed)
    save_csv(outdir / "dataset.csv", X, y)
    labels, counts = np.unique(y, return_counts=True)
    _write_json(outdir / "generate_report.json", {
        "schema_version": SCHEMA_VERSION,
        "config": config,
        "n": X.shape[0],
        "n_features": X.shape[1],
        "label_counts": {int(l): int(k) for l, k in zip(labels, counts)},
        "dataset": "dataset.csv",
    })
    print(f"wrote {outdir / 'dataset.csv'} ({X.shape[0]} points, {X.shape[1]} features)")
    return 0


def cmd_fit(args) -> int:
    config, _, seed, _, outdir = _resolve(args)
    config["c"] = args.c
    X, y = load_csv(args.input, label_column=_parse_label_column(args.label_column))
    Xn = normalize_features(X, args.normalize)
    model = FuzzyCMeans(n_clusters=args.c, m=args.m, n_init=args.restarts,
                        random_state=seed).fit(Xn)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "config": config,
        "n": Xn.shape[0],
        "n_features": Xn.shape[1],
        "objective": model.objective_,
        "n_iter": model.n_iter_,
        "converged": model.converged_,
        "n_reseeded": model.n_reseeded_,
        "restart_objectives": model.restart_objectives_,
        "cluster_centers": model.cluster_centers_,
        "labels": model.labels_,
        "memberships": model.membership_,
    }
    if y is not None and len(np.unique(y)) == args.c:
        from .evaluation import clustering_accuracy

        payload["accuracy"] = clustering_accuracy(model.membership_, y)
    _write_json(outdir / "fit_report.json", payload)
    print(f"objective {model.objective_:.6g} after {model.n_iter_} iterations"
          f" ({'converged' if model.converged_ else 'iteration cap reached'})")
    return 0


def _fit_scan(args, config, gamma, seed, indexes):
    X, _ = load_csv(args.input, label_column=_parse_label_column(args.label_column))
    Xn = normalize_features(X, args.normalize)
    scan = ClusterCountScan(cmin=args.cmin, cmax=args.cmax, m=args.m, gamma=gamma,
                            indexes=indexes, wpc1_mode=args.wpc1_mode,
                            n_init=args.restarts, random_state=seed).fit(Xn)
    scan.require_any_ranking()
    return Xn, scan


def cmd_cvi(args) -> int:
    config, gamma, seed, indexes, outdir = _resolve(args)
    Xn, scan = _fit_scan(args, config, gamma, seed, indexes)
    payload = {"schema_version": SCHEMA_VERSION, "config": config,
               "n": Xn.shape[0], "n_features": Xn.shape[1]}
    payload.update(_scan_payload(scan, indexes))
    _write_json(outdir / "cvi_report.json", payload)
    _write_csv(outdir / "cvi_values.csv", ("c", "index", "value"), _values_rows(scan, indexes))
    _write_csv(outdir / "cvi_rankings.csv", ("index", "rank", "c", "value"),
               _ranking_rows(scan, indexes))
    _print_rankings(scan.rankings_,
                    {name: (scan.wp_report_.wp if name == "wp" else scan.cvi_report_.values[name])
                     for name in indexes},
                    args.top_k)
    return 0


def cmd_rank(args) -> int:
    config, gamma, seed, indexes, outdir = _resolve(args)
    if args.wpc_series is not None:
        curve = _comma_list(args.wpc_series, float, "wpc value")
        start = 1 if args.cmin == 2 else args.cmin - 1
        if len(curve) < 3:
            raise ValueError("--wpc-series needs at least three values")
        series = {start + i: v for i, v in enumerate(curve)}
        report = wp_index(series)
        config["cmax"] = max(series) - 1
        payload = {
            "schema_version": SCHEMA_VERSION,
            "config": config,
            "wpc": {"values": series, "injected": True},
            "wp": {
                "direction": DIRECTIONS["wp"],
                "case_used": report.case_used,
                "wpi1": report.wpi1,
                "wpi2": report.wpi2,
                "values": report.wp,
                "ranking": list(report.ranking),
            },
            "rankings": {"wp": list(report.ranking)},
        }
        _write_json(outdir / "rank_report.json", payload)
        _print_rankings({"wp": report.ranking}, {"wp": report.wp}, args.top_k)
        return 0
    if args.input is None:
        raise ValueError("rank needs --input (or the --wpc-series hook)")
    Xn, scan = _fit_scan(args, config, gamma, seed, indexes)
    payload = {"schema_version": SCHEMA_VERSION, "config": config,
               "n": Xn.shape[0], "n_features": Xn.shape[1]}
    payload.update(_scan_payload(scan, indexes))
    _write_json(outdir / "rank_report.json", payload)
    _print_rankings(scan.rankings_,
                    {name: (scan.wp_report_.wp if name == "wp" else scan.cvi_report_.values[name])
                     for name in indexes},
                    args.top_k)
    return 0


def cmd_bench(args) -> int:
    config, gamma, seed, indexes, outdir = _resolve(args)
    score = run_benchmark(args.input, m=args.m, gamma=gamma, indexes=indexes,
                          wpc1_mode=args.wpc1_mode, normalize=args.normalize,
                          restarts=args.restarts, seed=seed, threads=args.threads)
    outcomes = []
    for o in score.outcomes:
        outcomes.append({
            "name": o.name, "kind": o.kind, "c_true": o.c_true, "cmax": o.cmax,
            "accuracy": o.accuracy, "gate_passed": o.gate_passed,
            "ranks": o.ranks, "r_scores": o.r_scores, "i_scores": o.i_scores,
            "rankings": {k: list(v) for k, v in o.rankings.items()},
        })
    _write_json(outdir / "bench_report.json", {
        "schema_version": SCHEMA_VERSION,
        "config": config,
        "n_datasets": len(score.outcomes),
        "n_gated_out": score.n_gated_out,
        "correct_counts": score.correct_counts,
        "average_ranks": score.average_ranks,
        "r_score_totals": score.r_score_totals,
        "i_score_totals": score.i_score_totals,
        "datasets": outcomes,
    })
    _write_csv(outdir / "bench_summary.csv",
               ("index", "correct_count", "average_rank", "r_score_total", "i_score_total"),
               [(name, score.correct_counts[name], _cell(score.average_ranks[name]),
                 score.r_score_totals[name], _cell(score.i_score_totals[name]))
                for name in indexes])
    _write_csv(outdir / "bench_datasets.csv",
               ("dataset", "kind", "c_true", "cmax", "accuracy", "gate_passed"),
               [(o.name, o.kind, o.c_true, o.cmax, _cell(o.accuracy), o.gate_passed)
                for o in score.outcomes])
    rows = []
    for o in score.outcomes:
        for name in indexes:
            rows.append((o.name, name, _cell(o.ranks.get(name)),
                         _cell(o.r_scores[name]["total"] if o.r_scores else None),
                         _cell(o.i_scores[name] if o.i_scores else None)))
    _write_csv(outdir / "bench_scores.csv",
               ("dataset", "index", "rank_of_true", "r_score_total", "i_score"), rows)
    kept = len(score.outcomes) - score.n_gated_out
    print(f"benchmarked {len(score.outcomes)} datasets ({kept} past the gate)")
    for name in indexes:
        print(f"{name}: correct {score.correct_counts[name]}/{kept}, "
              f"average rank {_cell(score.average_ranks[name]) or 'n/a'}")
    return 0


def cmd_sensitivity(args) -> int:
    config, gamma, seed, indexes, outdir = _resolve(args)
    gammas = _comma_list(args.gammas, float, "gamma")
    if args.repeats < 2:
        raise ValueError(f"--repeats must be >= 2, got {args.repeats}")
    config["gammas"] = gammas
    config["repeats"] = args.repeats
    config["mode"] = args.mode
    spec = load_mixture_spec(args.input)
    report = sensitivity_study([spec], gammas, args.repeats, args.m, mode=args.mode,
                               cmin=args.cmin, cmax=args.cmax, restarts=args.restarts,
                               wpc1_mode=args.wpc1_mode, normalize=args.normalize,
                               base_seed=seed)
    _write_json(outdir / "sensitivity_report.json", {
        "schema_version": SCHEMA_VERSION,
        "config": config,
        "entries": [{
            "dataset": e.dataset, "gamma": e.gamma,
            "sd_by_c": e.sd_by_c, "average_sd": e.average_sd,
            "modal_rank": e.modal_rank, "modal_rank_count": e.modal_rank_count,
        } for e in report.entries],
    })
    _write_csv(outdir / "sensitivity_sd.csv", ("dataset", "gamma", "c", "sd"),
               [(e.dataset, _cell(e.gamma), c, _cell(sd))
                for e in report.entries for c, sd in sorted(e.sd_by_c.items())])
    _write_csv(outdir / "sensitivity_summary.csv",
               ("dataset", "gamma", "average_sd", "modal_rank", "modal_rank_count"),
               [(e.dataset, _cell(e.gamma), _cell(e.average_sd),
                 _cell(e.modal_rank), e.modal_rank_count) for e in report.entries])
    for e in report.entries:
        print(f"gamma={e.gamma:g}: average sd {e.average_sd:.6g}, "
              f"modal rank of true count {e.modal_rank} ({e.modal_rank_count}/{args.repeats})")
    return 0


def cmd_image(args) -> int:
    config, gamma, seed, indexes, outdir = _resolve(args)
    X = image_to_points(args.input, IMAGE_TARGET_W, IMAGE_TARGET_H)
    if np.allclose(X, X[0], rtol=0.0, atol=1e-9):
        raise DegeneracyError("uniform image: every pixel has the same color")
    Xn = normalize_features(X, args.normalize)
    scan = ClusterCountScan(cmin=args.cmin, cmax=args.cmax, m=args.m, gamma=gamma,
                            indexes=indexes, wpc1_mode=args.wpc1_mode,
                            n_init=args.restarts, random_state=seed).fit(Xn)
    scan.require_any_ranking()
    previews = []
    for c in range(args.cmin, args.cmax + 1):
        model = scan.models_[c]
        # cluster colors are membership^m-weighted means in raw RGB space,
        # so previews stay faithful under any --normalize choice
        weights = model.membership_ ** args.m
        totals = weights.sum(axis=0)
        colors = np.zeros((c, 3))
        good = totals > 0
        colors[good] = (weights.T[good] @ X) / totals[good, None]
        frame = colors[model.labels_].reshape(IMAGE_TARGET_H, IMAGE_TARGET_W, 3)
        name = f"preview_c{c}.ppm"
        write_ppm(outdir / name, frame)
        previews.append(name)
    payload = {"schema_version": SCHEMA_VERSION, "config": config,
               "n": X.shape[0], "n_features": X.shape[1],
               "target_size": [IMAGE_TARGET_W, IMAGE_TARGET_H],
               "previews": previews}
    payload.update(_scan_payload(scan, indexes))
    _write_json(outdir / "image_report.json", payload)
    _write_csv(outdir / "image_values.csv", ("c", "index", "value"), _values_rows(scan, indexes))
    _write_csv(outdir / "image_rankings.csv", ("index", "rank", "c", "value"),
               _ranking_rows(scan, indexes))
    _print_rankings(scan.rankings_,
                    {name: (scan.wp_report_.wp if name == "wp" else scan.cvi_report_.values[name])
                     for name in indexes},
                    args.top_k)
    return 0


_HANDLERS = {
    "generate": cmd_generate,
    "fit": cmd_fit,
    "cvi": cmd_cvi,
    "rank": cmd_rank,
    "bench": cmd_bench,
    "sensitivity": cmd_sensitivity,
    "image": cmd_image,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except DegeneracyError as exc:
        print(f"degenerate: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry_point() -> None:
    sys.exit(main())
