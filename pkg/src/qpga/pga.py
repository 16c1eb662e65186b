"""Geodesic PCA on the hypersphere: tangent projection at the Karcher mean,
eigendecomposition of the uncentered tangent covariance, and projection of
data onto a low-dimensional unit sphere (plus an approximate inverse).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import manifold
from .errors import (
    DimensionMismatchError,
    EmptySpectrumError,
    ManifestMismatchError,
    NotInvertibleError,
)
from .manifold import FrechetConfig

MODES = ("renormalize", "exp_basepoint")


@dataclass(frozen=True)
class QpgaModel:
    mean: np.ndarray                 # Frechet mean on S^(N-1)
    components: np.ndarray           # (N, D), orthonormal columns
    eigenvalues: np.ndarray          # top D, non-increasing, clamped >= 0
    full_spectrum: np.ndarray        # all N eigenvalues, non-increasing
    total_variance: float
    mode: str
    mean_radius: float               # mean tangent norm over the training set
    rank_deficient: bool = field(default=False)

    @property
    def n_features(self) -> int:
        return self.components.shape[0]

    @property
    def n_components(self) -> int:
        return self.components.shape[1]

    @property
    def ev_ratios(self) -> np.ndarray:
        if self.total_variance <= 0:
            return np.zeros_like(self.eigenvalues)
        return self.eigenvalues / self.total_variance

    def cumulative_explained_variance(self) -> np.ndarray:
        if self.total_variance <= 0:
            return np.zeros_like(self.full_spectrum)
        return np.cumsum(self.full_spectrum) / self.total_variance


def _fix_signs(V: np.ndarray) -> np.ndarray:
    # Deterministic sign convention: largest-magnitude entry of each column
    # is positive.
    out = V.copy()
    for j in range(out.shape[1]):
        k = int(np.argmax(np.abs(out[:, j])))
        if out[k, j] < 0:
            out[:, j] = -out[:, j]
    return out


def fit(X, D: int, frechet_cfg: FrechetConfig | None = None, mode: str = "renormalize") -> QpgaModel:
    """Fit the model on unit-norm rows X, keeping the top D components.

    The tangent covariance is uncentered: C = (1/M) sum v_i v_i^T with
    v_i = Log_mu(x_i).
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] < 2:
        raise DimensionMismatchError("need at least 2 rows")
    N = X.shape[1]
    if not 1 <= D <= N:
        raise ValueError(f"D must be in [1, {N}], got {D}")
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    mu = manifold.frechet_mean(X, frechet_cfg)
    V = manifold.log_map_many(mu, X)
    C = (V.T @ V) / X.shape[0]
    evals, evecs = np.linalg.eigh(C)
    order = np.argsort(evals)[::-1]
    evals = np.clip(evals[order], 0.0, None)
    evecs = _fix_signs(evecs[:, order])
    return QpgaModel(
        mean=mu,
        components=evecs[:, :D],
        eigenvalues=evals[:D],
        full_spectrum=evals,
        total_variance=float(evals.sum()),
        mode=mode,
        mean_radius=float(np.linalg.norm(V, axis=1).mean()),
        rank_deficient=bool(evals[D - 1] < 1e-12),
    )


def transform(model: QpgaModel, X) -> np.ndarray:
    """Project rows of X onto the model's low-dimensional unit sphere."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if X.shape[1] != model.n_features:
        raise DimensionMismatchError(
            f"rows of length {X.shape[1]}, model expects {model.n_features}"
        )
    Y = manifold.log_map_many(model.mean, X) @ model.components
    D = model.n_components
    out = np.empty_like(Y)
    e1 = np.zeros(D)
    e1[0] = 1.0
    if model.mode == "renormalize":
        norms = np.linalg.norm(Y, axis=1)
        small = norms < 1e-12
        norms[small] = 1.0
        out = Y / norms[:, None]
        out[small] = e1
    else:  # exp_basepoint: spherical exponential at e1, e1-component dropped
        for i, y in enumerate(Y):
            v = y - (y @ e1) * e1
            out[i] = manifold.exp_map(e1, v) if np.linalg.norm(v) >= 1e-12 else e1
    return out


def inverse_transform(model: QpgaModel, Z) -> np.ndarray:
    """Approximate inverse: scale latent rows by the stored mean tangent
    radius, lift through the component basis, and exponentiate at the mean.
    Lossy whenever D < N.
    """
    if model.mode != "renormalize":
        raise NotInvertibleError(
            "exp_basepoint mode discards the first latent coordinate; inversion "
            "is only supported for renormalize mode"
        )
    Z = np.asarray(Z, dtype=float)
    if Z.ndim == 1:
        Z = Z[None, :]
    if Z.shape[1] != model.n_components:
        raise DimensionMismatchError(
            f"rows of length {Z.shape[1]}, model has D={model.n_components}"
        )
    out = np.empty((Z.shape[0], model.n_features))
    for i, z in enumerate(Z):
        v = model.components @ (model.mean_radius * z)
        out[i] = manifold.exp_map(model.mean, v)
    return out


def components_for_variance(eigenvalues, beta: float) -> int:
    """Smallest k whose leading eigenvalue mass reaches beta of the total."""
    evals = np.asarray(eigenvalues, dtype=float)
    if evals.size == 0:
        raise EmptySpectrumError("empty eigenvalue spectrum")
    if not 0.0 < beta <= 1.0:
        raise ValueError("beta must be in (0, 1]")
    total = evals.sum()
    cum = np.cumsum(evals)
    # Relative guard so beta = lambda_1/sigma_T^2 style thresholds are not
    # missed to rounding.
    threshold = beta * total
    hits = np.nonzero(cum >= threshold - 1e-12 * max(total, 1.0))[0]
    if hits.size == 0:
        return evals.size
    return int(hits[0]) + 1


def save_model(model: QpgaModel, path) -> None:
    """Persist the model as a matrix container plus a JSON manifest."""
    from .dataio import save_matrix

    path = Path(path)
    payload = np.vstack(
        [
            model.mean[None, :],
            model.components.T,
            np.pad(model.eigenvalues, (0, model.n_features - model.n_components))[None, :],
            model.full_spectrum[None, :],
        ]
    )
    manifest = {
        "kind": "qpga-model",
        "n_features": model.n_features,
        "n_components": model.n_components,
        "mode": model.mode,
        "total_variance": model.total_variance,
        "mean_radius": model.mean_radius,
        "rank_deficient": model.rank_deficient,
    }
    save_matrix(path, payload, manifest)


def load_model(path) -> QpgaModel:
    from .dataio import load_matrix

    payload, manifest = load_matrix(Path(path))
    if manifest.get("kind") != "qpga-model":
        raise ManifestMismatchError(f"{path} does not hold a model")
    N = int(manifest["n_features"])
    D = int(manifest["n_components"])
    return QpgaModel(
        mean=payload[0],
        components=payload[1 : 1 + D].T,
        eigenvalues=payload[1 + D][:D],
        full_spectrum=payload[2 + D],
        total_variance=float(manifest["total_variance"]),
        mode=manifest["mode"],
        mean_radius=float(manifest["mean_radius"]),
        rank_deficient=bool(manifest["rank_deficient"]),
    )
