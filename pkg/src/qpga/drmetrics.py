"""Embedding-quality metrics: co-ranking matrix, trustworthiness/continuity
(with Euclidean or geodesic pairwise rankings), and geodesic reconstruction
error.

Rank ties are broken by ascending point index, so all metrics are
deterministic. Rank 1 is the nearest neighbor.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, InvalidKError, NonUnitNormError

EUCLIDEAN = "euclidean"
GEODESIC = "geodesic"


@dataclass(frozen=True)
class CorankingMatrix:
    counts: np.ndarray  # (n-1, n-1) integer counts
    n: int


def _check_unit_rows(X: np.ndarray, what: str):
    norms = np.linalg.norm(X, axis=1)
    if np.any(np.abs(norms - 1.0) > 1e-8):
        raise NonUnitNormError(f"{what}: geodesic distance needs unit-norm rows")


def pairwise_distances(X, kind: str = EUCLIDEAN) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if kind == EUCLIDEAN:
        sq = np.sum(X * X, axis=1)
        d2 = sq[:, None] + sq[None, :] - 2.0 * (X @ X.T)
        return np.sqrt(np.maximum(d2, 0.0))
    if kind == GEODESIC:
        _check_unit_rows(X, "pairwise_distances")
        return np.arccos(np.clip(X @ X.T, -1.0, 1.0))
    raise ValueError(f"unknown distance kind {kind!r}")


def rank_matrix(distances: np.ndarray) -> np.ndarray:
    """ranks[i, j] = rank of j by distance from i (1 = nearest, self = 0).

    Ties broken by smaller index first (stable sort).
    """
    d = np.array(distances, dtype=float)
    n = d.shape[0]
    np.fill_diagonal(d, -np.inf)
    ranks = np.empty((n, n), dtype=np.int64)
    for i in range(n):
        order = np.argsort(d[i], kind="stable")
        ranks[i, order] = np.arange(n)
    return ranks


def coranking_matrix(X_high, X_low, d_high: str = EUCLIDEAN, d_low: str = EUCLIDEAN) -> CorankingMatrix:
    """Count how pairwise neighbor ranks move between the two spaces.

    Entry (r_h - 1, r_l - 1) is incremented once per ordered pair (i, j),
    j != i; entries sum to n(n-1).
    """
    X_high = np.asarray(X_high, dtype=float)
    X_low = np.asarray(X_low, dtype=float)
    if X_high.shape[0] != X_low.shape[0]:
        raise DimensionMismatchError("row counts differ")
    n = X_high.shape[0]
    if n < 3:
        raise DimensionMismatchError("need at least 3 rows")
    rh = rank_matrix(pairwise_distances(X_high, d_high))
    rl = rank_matrix(pairwise_distances(X_low, d_low))
    mask = ~np.eye(n, dtype=bool)
    counts = np.zeros((n - 1, n - 1), dtype=np.int64)
    np.add.at(counts, (rh[mask] - 1, rl[mask] - 1), 1)
    return CorankingMatrix(counts=counts, n=n)


def _check_k(k: int, n: int):
    if not 1 <= k < n / 2:
        raise InvalidKError(f"k must satisfy 1 <= k < n/2 (got k={k}, n={n})")


def trustworthiness(X_high, X_low, k: int, d_high: str = EUCLIDEAN, d_low: str = EUCLIDEAN) -> float:
    """Penalizes k-neighborhood members of the high-dimensional space that
    fall outside the k-neighborhood in the embedding, weighted by their
    embedding rank."""
    X_high = np.asarray(X_high, dtype=float)
    X_low = np.asarray(X_low, dtype=float)
    if X_high.shape[0] != X_low.shape[0]:
        raise DimensionMismatchError("row counts differ")
    n = X_high.shape[0]
    _check_k(k, n)
    rh = rank_matrix(pairwise_distances(X_high, d_high))
    rl = rank_matrix(pairwise_distances(X_low, d_low))
    members = (rh >= 1) & (rh <= k) & (rl > k)
    penalty = float(np.sum((rl - k)[members]))
    return 1.0 - 2.0 / (n * k * (2 * n - 3 * k - 1)) * penalty


def continuity(X_high, X_low, k: int, d_high: str = EUCLIDEAN, d_low: str = EUCLIDEAN) -> float:
    """Mirror of trustworthiness with the roles of the two spaces swapped."""
    return trustworthiness(X_low, X_high, k, d_high=d_low, d_low=d_high)


def reconstruction_error(X, X_rec) -> float:
    """Mean squared geodesic distance between matched unit-norm rows."""
    X = np.asarray(X, dtype=float)
    X_rec = np.asarray(X_rec, dtype=float)
    if X.shape != X_rec.shape:
        raise DimensionMismatchError("shapes differ")
    _check_unit_rows(X, "reconstruction_error (original)")
    _check_unit_rows(X_rec, "reconstruction_error (reconstruction)")
    dots = np.clip(np.sum(X * X_rec, axis=1), -1.0, 1.0)
    return float(np.mean(np.arccos(dots) ** 2))
