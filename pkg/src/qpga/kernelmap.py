"""Kernel feature maps onto the unit sphere.

The linear map is plain row normalization. The polynomial/rbf/sigmoid maps
use a landmark (Nystroem) approximation: features are whitened kernel
evaluations against m sampled training rows, then normalized to unit norm.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatchError,
    InsufficientDataError,
    SingularKernelError,
    ZeroVectorError,
)

KINDS = ("linear", "polynomial", "rbf", "sigmoid")

# Eigenvalues of the landmark kernel matrix below this are dropped when
# forming the inverse square root, to avoid amplifying numerical noise.
EIG_CLIP = 1e-12


@dataclass(frozen=True)
class KernelSpec:
    kind: str = "linear"
    degree: int = 3
    gamma: float | None = None
    coef0: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if self.kind == "polynomial" and self.degree < 1:
            raise ValueError("polynomial degree must be >= 1")
        if self.kind in ("rbf", "sigmoid") and self.gamma is not None and self.gamma <= 0:
            raise ValueError(f"{self.kind} gamma must be positive")

    def resolved_gamma(self, n_features: int) -> float:
        # Default gamma 1/N when unspecified.
        return self.gamma if self.gamma is not None else 1.0 / n_features

    def resolved_coef0(self) -> float:
        # Polynomial coef0 defaults to 1 so constant terms survive; an
        # explicit 0.0 is honored as given.
        if self.coef0 is None:
            return 1.0 if self.kind == "polynomial" else 0.0
        return self.coef0


def kernel_eval(spec: KernelSpec, x, y) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise DimensionMismatchError(f"shapes {x.shape} and {y.shape} differ")
    return float(_kernel_matrix(spec, x[None, :], y[None, :])[0, 0])


def _kernel_matrix(spec: KernelSpec, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    g = spec.resolved_gamma(A.shape[1])
    c0 = spec.resolved_coef0()
    if spec.kind == "linear":
        return A @ B.T
    if spec.kind == "polynomial":
        return (g * (A @ B.T) + c0) ** spec.degree
    if spec.kind == "rbf":
        sq = (
            np.sum(A * A, axis=1)[:, None]
            + np.sum(B * B, axis=1)[None, :]
            - 2.0 * (A @ B.T)
        )
        return np.exp(-g * np.maximum(sq, 0.0))
    return np.tanh(g * (A @ B.T) + c0)


@dataclass(frozen=True)
class FeatureMapper:
    spec: KernelSpec
    landmarks: np.ndarray | None  # None for the trivial linear mapper
    whitener: np.ndarray | None
    m: int
    seed: int
    n_features: int = field(default=0)


def fit_feature_map(X, spec: KernelSpec, m: int | None = None, seed: int = 0) -> FeatureMapper:
    """Fit a landmark feature map on training rows X.

    m landmarks are sampled uniformly without replacement under seed. The
    whitener is the pseudo-inverse square root of the landmark kernel matrix.
    The linear kind needs no landmarks and returns a trivial mapper.
    """
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    if spec.kind == "linear":
        return FeatureMapper(spec, None, None, 0, seed, X.shape[1])
    if m is None:
        m = min(n, 100)
    if n < m:
        raise InsufficientDataError(f"{n} rows < {m} landmarks")
    if m < 1:
        raise InsufficientDataError("need at least one landmark")
    rng = np.random.default_rng(seed)
    idx = np.sort(rng.choice(n, size=m, replace=False))
    landmarks = X[idx].copy()
    K = _kernel_matrix(spec, landmarks, landmarks)
    K = 0.5 * (K + K.T)
    evals, evecs = np.linalg.eigh(K)
    keep = evals > EIG_CLIP
    if not np.any(keep):
        raise SingularKernelError("landmark kernel matrix is numerically singular")
    inv_sqrt = evecs[:, keep] @ np.diag(evals[keep] ** -0.5) @ evecs[:, keep].T
    inv_sqrt = 0.5 * (inv_sqrt + inv_sqrt.T)
    return FeatureMapper(spec, landmarks, inv_sqrt, m, seed, X.shape[1])


def apply_feature_map(mapper: FeatureMapper, X) -> np.ndarray:
    """Map rows of X onto the unit sphere; every output row has norm 1."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if X.shape[1] != mapper.n_features:
        raise DimensionMismatchError(
            f"rows of length {X.shape[1]}, mapper trained on {mapper.n_features}"
        )
    if mapper.spec.kind == "linear":
        feats = X
    else:
        feats = _kernel_matrix(mapper.spec, X, mapper.landmarks) @ mapper.whitener
    norms = np.linalg.norm(feats, axis=1)
    if np.any(norms < 1e-12):
        raise ZeroVectorError("a row has (near-)zero feature norm")
    return feats / norms[:, None]


def nystroem_kernel_values(mapper: FeatureMapper, X, Y) -> np.ndarray:
    """Approximate kernel values phi(x).phi(y) from unnormalized features.

    Used to check the quality of the landmark approximation against the
    exact kernel; not part of the sphere-mapping path.
    """
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    fx = _kernel_matrix(mapper.spec, X, mapper.landmarks) @ mapper.whitener
    fy = _kernel_matrix(mapper.spec, Y, mapper.landmarks) @ mapper.whitener
    return fx @ fy.T
