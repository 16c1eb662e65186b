"""Riemannian primitives on the unit hypersphere S^(N-1).

Points are unit-norm 1-D float arrays; tangent vectors at a base point mu are
arrays orthogonal to mu. All inner products are clamped to [-1, 1] before
arccos so rounding noise cannot produce NaNs.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    AntipodalPointError,
    DegenerateInputError,
    DimensionMismatchError,
    NoConvergenceError,
    NonTangentError,
)

# Below this, 1 - <x, mu> is treated as zero and the log map returns the zero
# tangent vector; symmetrically, <x, mu> + 1 below it means antipodal input.
IDENTITY_EPS = 1e-12


@dataclass(frozen=True)
class SpherePoint:
    """Unit-norm vector on S^(N-1)."""

    coords: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coords, dtype=float)
        if c.ndim != 1 or c.shape[0] < 2:
            raise DimensionMismatchError("sphere point must be a vector of length >= 2")
        if abs(np.linalg.norm(c) - 1.0) > 1e-9:
            raise DegenerateInputError("sphere point is not unit norm")
        object.__setattr__(self, "coords", c)


@dataclass(frozen=True)
class TangentVector:
    """Vector in the tangent space of the sphere at ``base``."""

    base: SpherePoint
    coords: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coords, dtype=float)
        if c.shape != self.base.coords.shape:
            raise DimensionMismatchError("tangent vector dimension differs from base point")
        if abs(float(c @ self.base.coords)) > 1e-9:
            raise NonTangentError("tangent vector is not orthogonal to its base point")
        object.__setattr__(self, "coords", c)


@dataclass(frozen=True)
class FrechetConfig:
    max_iterations: int = 512
    tolerance: float = 1e-10
    step_size: float = 1.0

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if not 0.0 < self.step_size <= 2.0:
            raise ValueError("step_size must be in (0, 2]")


def _as_vec(x) -> np.ndarray:
    if isinstance(x, SpherePoint):
        return x.coords
    if isinstance(x, TangentVector):
        return x.coords
    return np.asarray(x, dtype=float)


def _check_same_dim(a: np.ndarray, b: np.ndarray):
    if a.shape != b.shape:
        raise DimensionMismatchError(f"shapes {a.shape} and {b.shape} differ")


def log_map(mu, x) -> np.ndarray:
    """Map the sphere point x into the tangent space at mu.

    Returns v with ||v|| = arccos(<x, mu>) pointing along the great circle
    from mu to x. Identical points give the exact zero vector; antipodal
    points are an error because the direction is undefined.
    """
    mu = _as_vec(mu)
    x = _as_vec(x)
    _check_same_dim(mu, x)
    dot = float(np.clip(x @ mu, -1.0, 1.0))
    if dot >= 1.0 - IDENTITY_EPS:
        return np.zeros_like(mu)
    if dot <= -1.0 + IDENTITY_EPS:
        raise AntipodalPointError("log map undefined for antipodal points")
    residual = x - dot * mu
    return residual / np.linalg.norm(residual) * np.arccos(dot)


def log_map_many(mu, X: np.ndarray) -> np.ndarray:
    """Vectorized log map of the rows of X at base point mu.

    Rows (numerically) equal to mu map to zero; antipodal rows raise.
    """
    mu = _as_vec(mu)
    X = np.asarray(X, dtype=float)
    if X.shape[1] != mu.shape[0]:
        raise DimensionMismatchError(f"rows of length {X.shape[1]}, mu of length {mu.shape[0]}")
    dots = np.clip(X @ mu, -1.0, 1.0)
    if np.any(dots <= -1.0 + IDENTITY_EPS):
        raise AntipodalPointError("log map undefined for antipodal points")
    residual = X - np.outer(dots, mu)
    norms = np.linalg.norm(residual, axis=1)
    at_mu = dots >= 1.0 - IDENTITY_EPS
    norms[at_mu] = 1.0  # avoid 0/0; rows are zeroed below
    out = residual / norms[:, None] * np.arccos(dots)[:, None]
    out[at_mu] = 0.0
    return out


def exp_map(mu, v) -> np.ndarray:
    """Project the tangent vector v at mu back onto the sphere."""
    mu = _as_vec(mu)
    v = _as_vec(v)
    _check_same_dim(mu, v)
    norm = float(np.linalg.norm(v))
    if norm < 1e-12:
        return mu.copy()
    if abs(float(v @ mu)) > 1e-6 * norm:
        raise NonTangentError("vector is not tangent at the base point")
    out = np.cos(norm) * mu + np.sin(norm) * v / norm
    return out / np.linalg.norm(out)


def geodesic_distance(a, b) -> float:
    """Great-circle distance arccos(<a, b>) in radians; symmetric, in [0, pi].

    Evaluated through the chord length (d = 2 arcsin(||a - b|| / 2)), which is
    algebraically identical on the unit sphere but keeps full precision for
    nearly identical or nearly antipodal points, where arccos loses ~8 digits.
    """
    a = _as_vec(a)
    b = _as_vec(b)
    _check_same_dim(a, b)
    if a @ b >= 0.0:
        return float(2.0 * np.arcsin(min(np.linalg.norm(a - b) / 2.0, 1.0)))
    return float(np.pi - 2.0 * np.arcsin(min(np.linalg.norm(a + b) / 2.0, 1.0)))


def frechet_mean(points, cfg: FrechetConfig | None = None) -> np.ndarray:
    """Karcher mean of sphere points by tangent-space gradient descent.

    ``points`` is an (M, N) array (or list of vectors). Initialization is the
    normalized Euclidean mean; if that is degenerate (norm < 1e-9), the first
    point is used instead. Convergence is declared when the mean tangent
    vector at the iterate has norm below cfg.tolerance.
    """
    cfg = cfg or FrechetConfig()
    X = np.asarray([_as_vec(p) for p in points], dtype=float)
    if X.ndim != 2 or X.shape[0] == 0:
        raise DegenerateInputError("need a non-empty list of points")
    if X.shape[0] == 1:
        return X[0].copy()
    centroid = X.mean(axis=0)
    norm = np.linalg.norm(centroid)
    mu = centroid / norm if norm >= 1e-9 else X[0].copy()
    for _ in range(cfg.max_iterations):
        mean_tangent = log_map_many(mu, X).mean(axis=0)
        # Averaging M log vectors leaves O(M eps) non-tangency that would trip
        # the exp_map check once ||mean_tangent|| is tiny; re-project first.
        mean_tangent = mean_tangent - (mean_tangent @ mu) * mu
        if np.linalg.norm(mean_tangent) < cfg.tolerance:
            return mu
        mu = exp_map(mu, cfg.step_size * mean_tangent)
    raise NoConvergenceError(
        f"Frechet mean did not converge in {cfg.max_iterations} iterations"
    )
