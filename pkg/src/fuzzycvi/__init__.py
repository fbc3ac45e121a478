"""Fuzzy c-means clustering with correlation-based cluster-count selection."""

from .exceptions import (CentroidReseedWarning, CsvParseError, DegeneracyError,
                         DegeneracyWarning)
from .fcm import FuzzyCMeans, fcm_objective, update_centroids, update_memberships
from .wp import (WpcSeries, WpReport, adjusted_centroids, default_gamma,
                 pairwise_distances, pearson, wp_index, wpc, wpc_at_one,
                 wpc_series, wpi)
from .indexes import (DIRECTIONS, REFERENCE_INDEXES, CviReport, compute_all, gc,
                      kwon2, pbm, rank_counts, tang, wl, xb)
from .data import (MixtureComponent, MixtureSpec, generate_mixture,
                   image_to_points, load_csv, load_image, load_mixture_spec,
                   mixture_spec_from_dict, normalize_features, read_ppm,
                   save_csv, write_ppm)
from .scan import ALL_INDEXES, ClusterCountScan
from .evaluation import (BenchmarkScore, DatasetOutcome, SensitivityEntry,
                         SensitivityReport, clustering_accuracy, cmax_rule,
                         gate, i_score, r_score, rank_of, run_benchmark,
                         sensitivity_study)

__version__ = "0.1.0"

__all__ = [
    "ALL_INDEXES",
    "BenchmarkScore",
    "CentroidReseedWarning",
    "ClusterCountScan",
    "CsvParseError",
    "CviReport",
    "DIRECTIONS",
    "DatasetOutcome",
    "DegeneracyError",
    "DegeneracyWarning",
    "FuzzyCMeans",
    "MixtureComponent",
    "MixtureSpec",
    "REFERENCE_INDEXES",
    "SensitivityEntry",
    "SensitivityReport",
    "WpReport",
    "WpcSeries",
    "adjusted_centroids",
    "clustering_accuracy",
    "cmax_rule",
    "compute_all",
    "default_gamma",
    "fcm_objective",
    "gate",
    "gc",
    "generate_mixture",
    "i_score",
    "image_to_points",
    "kwon2",
    "load_csv",
    "load_image",
    "load_mixture_spec",
    "mixture_spec_from_dict",
    "normalize_features",
    "pairwise_distances",
    "pbm",
    "pearson",
    "r_score",
    "rank_counts",
    "rank_of",
    "read_ppm",
    "run_benchmark",
    "save_csv",
    "sensitivity_study",
    "tang",
    "update_centroids",
    "update_memberships",
    "wl",
    "wp_index",
    "wpc",
    "wpc_at_one",
    "wpc_series",
    "wpi",
    "write_ppm",
    "xb",
]
