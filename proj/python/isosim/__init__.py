"""Isolation-similarity clustering (aNNE / iForest dissimilarity, MBSCAN, Density Peaks)."""

from ._isosim import (
    __version__,
    cli,
    dbscan,
    density_peaks,
    detectability,
    dissimilarity_matrix,
    euclidean_matrix,
    exact_similarity,
    f1_score,
    load_csv,
    min_max_normalize,
    simulate_vs_distance,
    simulate_vs_psi,
)

__all__ = [
    "__version__",
    "cli",
    "dbscan",
    "density_peaks",
    "detectability",
    "dissimilarity_matrix",
    "euclidean_matrix",
    "exact_similarity",
    "f1_score",
    "load_csv",
    "min_max_normalize",
    "simulate_vs_distance",
    "simulate_vs_psi",
]
