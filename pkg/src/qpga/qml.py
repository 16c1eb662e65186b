"""Downstream classifiers on latent amplitude vectors.

QSVM: quantum kernel matrix (squared state overlap) plus an SMO solver for
the SVM dual. VQC: amplitude encoding into a layered RY/RZ + all-pairs-CZ
ansatz, trained with Adam on parameter-shift gradients against binary
cross-entropy.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import qsim
from .errors import DimensionMismatchError, EmptyFoldError, NotConvergedError
from .qsim import GateOp, NoiseSpec

MAX_PAIR_UPDATES = 100_000


# ---------------------------------------------------------------------------
# QSVM


def kernel_matrix(A, B, backend: str = "analytic") -> np.ndarray:
    """Entry (i, j) = quantum kernel of A_i and B_j."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.shape[1] != B.shape[1]:
        raise DimensionMismatchError("latent dimensions differ")
    if backend == "analytic":
        return (A @ B.T) ** 2
    out = np.empty((A.shape[0], B.shape[0]))
    for i in range(A.shape[0]):
        for j in range(B.shape[0]):
            out[i, j] = qsim.quantum_kernel(A[i], B[j], backend=backend)
    return out


@dataclass(frozen=True)
class SvmModel:
    alphas: np.ndarray
    bias: float
    support_indices: np.ndarray
    C: float
    labels: np.ndarray  # training labels in {-1, +1}


def svm_train(K, y, C: float = 1.0, tol: float = 1e-3) -> SvmModel:
    """SMO on the SVM dual with maximal-violating-pair working-set selection.

    Minimizes (1/2) a^T Q a - e^T a with Q_ij = y_i y_j K_ij, subject to
    0 <= a_i <= C and y^T a = 0.
    """
    K = np.asarray(K, dtype=float)
    y = np.asarray(y, dtype=float)
    n = y.shape[0]
    if K.shape != (n, n):
        raise DimensionMismatchError("kernel matrix does not match labels")
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise ValueError("labels must be -1/+1")
    Q = K * np.outer(y, y)
    alpha = np.zeros(n)
    G = -np.ones(n)  # gradient of the dual objective: Q a - e

    for _ in range(MAX_PAIR_UPDATES):
        yG = -y * G
        up = ((alpha < C) & (y > 0)) | ((alpha > 0) & (y < 0))
        low = ((alpha < C) & (y < 0)) | ((alpha > 0) & (y > 0))
        if not up.any() or not low.any():
            break
        i = int(np.flatnonzero(up)[np.argmax(yG[up])])
        j = int(np.flatnonzero(low)[np.argmin(yG[low])])
        m_up, m_low = yG[i], yG[j]
        if m_up - m_low <= tol:
            break
        a = K[i, i] + K[j, j] - 2.0 * K[i, j]
        if a <= 0:
            a = 1e-12
        delta = (m_up - m_low) / a
        # Move along the equality constraint: a_i += y_i d, a_j -= y_j d.
        if y[i] > 0:
            delta = min(delta, C - alpha[i])
        else:
            delta = min(delta, alpha[i])
        if y[j] > 0:
            delta = min(delta, alpha[j])
        else:
            delta = min(delta, C - alpha[j])
        d_i = y[i] * delta
        d_j = -y[j] * delta
        alpha[i] += d_i
        alpha[j] += d_j
        G += Q[:, i] * d_i + Q[:, j] * d_j
    else:
        raise NotConvergedError(f"SMO did not converge in {MAX_PAIR_UPDATES} updates")

    yG = -y * G
    up = ((alpha < C) & (y > 0)) | ((alpha > 0) & (y < 0))
    low = ((alpha < C) & (y < 0)) | ((alpha > 0) & (y > 0))
    if up.any() and low.any():
        bias = (yG[up].max() + yG[low].min()) / 2.0
    else:
        bias = 0.0
    support = np.flatnonzero(alpha > 1e-12)
    return SvmModel(alphas=alpha, bias=float(bias), support_indices=support, C=C, labels=y)


def svm_decision(model: SvmModel, K_test) -> np.ndarray:
    K_test = np.asarray(K_test, dtype=float)
    if K_test.shape[1] != model.alphas.shape[0]:
        raise DimensionMismatchError("kernel columns must match training size")
    return K_test @ (model.alphas * model.labels) + model.bias


def svm_predict(model: SvmModel, K_test) -> np.ndarray:
    """Labels in {-1, +1}; an exact zero decision value maps to +1."""
    scores = svm_decision(model, K_test)
    return np.where(scores >= 0.0, 1.0, -1.0)


# ---------------------------------------------------------------------------
# Variational quantum classifier


@dataclass(frozen=True)
class VqcModel:
    params: np.ndarray
    q: int
    layers: int
    threshold: float = 0.5

    def __post_init__(self):
        params = np.asarray(self.params, dtype=float)
        if params.shape != (2 * self.q * self.layers,):
            raise DimensionMismatchError("parameter count must be 2*q*layers")
        if not np.all(np.isfinite(params)):
            raise ValueError("parameters must be finite")
        object.__setattr__(self, "params", params)


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 20
    learning_rate: float = 1e-2
    batch_size: int = 16
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    seed: int = 0
    noise: NoiseSpec | None = None

    def __post_init__(self):
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")


def ansatz_template(q: int, layers: int) -> list[GateOp]:
    """Per layer: RY then RZ on each qubit, then one CZ per unordered pair."""
    ops = []
    idx = 0
    for _ in range(layers):
        for w in range(q):
            ops.append(GateOp("RY", (w,), param=idx))
            idx += 1
            ops.append(GateOp("RZ", (w,), param=idx))
            idx += 1
        for a in range(q):
            for b in range(a + 1, q):
                ops.append(GateOp("CZ", (a, b)))
    return ops


def init_vqc(q: int, layers: int = 3, seed: int = 0) -> VqcModel:
    rng = np.random.default_rng(seed)
    params = rng.uniform(-np.pi, np.pi, size=2 * q * layers)
    return VqcModel(params=params, q=q, layers=layers)


def _sigmoid(z: float) -> float:
    return 1.0 / (1.0 + np.exp(-z))


def _forward(model: VqcModel, x, noise: NoiseSpec | None) -> float:
    template = ansatz_template(model.q, model.layers)
    circuit = qsim.bind_parameters(template, model.params)
    state = qsim.amplitude_encode(np.asarray(x, dtype=float), model.q)
    if noise is not None and (noise.p1 > 0 or noise.p2 > 0):
        rho = qsim.DensityMatrix.from_state(state)
        return qsim.expectation_x_all(qsim.evolve(rho, circuit, noise))
    return qsim.expectation_x_all(qsim.evolve(state, circuit))


def vqc_predict(model: VqcModel, x, noise: NoiseSpec | None = None) -> tuple[float, int]:
    """(probability, label); probability >= threshold classifies as 1."""
    prob = _sigmoid(_forward(model, x, noise))
    return prob, int(prob >= model.threshold)


def vqc_loss_gradient(X, y, model: VqcModel, noise: NoiseSpec | None = None):
    """(mean BCE loss, gradient) over all rows at the model's parameters.

    d(BCE)/d(expectation) = yhat - y, chained with the parameter-shift rule.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    template = ansatz_template(model.q, model.layers)
    noisy = noise is not None and (noise.p1 > 0 or noise.p2 > 0)
    grad = np.zeros_like(model.params)
    losses = np.empty(X.shape[0])
    for s, (row, label) in enumerate(zip(X, y)):
        state = qsim.amplitude_encode(row, model.q)
        inp = qsim.DensityMatrix.from_state(state) if noisy else state
        e_val = _forward(model, row, noise)
        yhat = np.clip(_sigmoid(e_val), 1e-12, 1.0 - 1e-12)
        losses[s] = -(label * np.log(yhat) + (1.0 - label) * np.log(1.0 - yhat))
        de = qsim.parameter_shift_gradient(template, model.params, inp, noise if noisy else None)
        grad += (yhat - label) * de
    return float(losses.mean()), grad / X.shape[0]


def vqc_train(X, y, model_init: VqcModel, cfg: TrainConfig) -> tuple[VqcModel, list[float]]:
    """Mini-batch Adam on BCE loss; returns the trained model and the
    per-epoch mean loss history. Deterministic under cfg.seed (which drives
    the per-epoch shuffle)."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.shape[0] != y.shape[0]:
        raise DimensionMismatchError("row counts differ")
    if X.shape[1] > 2**model_init.q:
        raise DimensionMismatchError("latent dimension exceeds 2^q")
    template = ansatz_template(model_init.q, model_init.layers)
    params = model_init.params.copy()
    m = np.zeros_like(params)
    v = np.zeros_like(params)
    step = 0
    history: list[float] = []
    noisy = cfg.noise is not None and (cfg.noise.p1 > 0 or cfg.noise.p2 > 0)
    noise = cfg.noise if noisy else None
    states = [qsim.amplitude_encode(row, model_init.q) for row in X]
    if noisy:
        states = [qsim.DensityMatrix.from_state(s) for s in states]
    shuffle_rng = np.random.default_rng(cfg.seed)

    for _ in range(cfg.epochs):
        order = shuffle_rng.permutation(X.shape[0])
        losses = []
        for start in range(0, order.shape[0], cfg.batch_size):
            batch = order[start : start + cfg.batch_size]
            grad = np.zeros_like(params)
            for s in batch:
                circuit = qsim.bind_parameters(template, params)
                e_val = qsim.expectation_x_all(qsim.evolve(states[s], circuit, noise))
                yhat = np.clip(_sigmoid(e_val), 1e-12, 1.0 - 1e-12)
                losses.append(-(y[s] * np.log(yhat) + (1.0 - y[s]) * np.log(1.0 - yhat)))
                de = qsim.parameter_shift_gradient(template, params, states[s], noise)
                grad += (yhat - y[s]) * de
            grad /= batch.shape[0]
            step += 1
            m = cfg.beta1 * m + (1.0 - cfg.beta1) * grad
            v = cfg.beta2 * v + (1.0 - cfg.beta2) * grad**2
            m_hat = m / (1.0 - cfg.beta1**step)
            v_hat = v / (1.0 - cfg.beta2**step)
            params = params - cfg.learning_rate * m_hat / (np.sqrt(v_hat) + cfg.eps)
        history.append(float(np.mean(losses)))

    trained = VqcModel(params=params, q=model_init.q, layers=model_init.layers,
                       threshold=model_init.threshold)
    return trained, history


# ---------------------------------------------------------------------------
# Evaluation


def accuracy_score(y_true, y_pred) -> float:
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    return float(np.mean(y_true == y_pred))


def f1_score(y_true, y_pred, positive=1) -> float:
    """F1 with the stated zero rule: no positive predictions -> 0."""
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    tp = np.sum((y_pred == positive) & (y_true == positive))
    fp = np.sum((y_pred == positive) & (y_true != positive))
    fn = np.sum((y_pred != positive) & (y_true == positive))
    if tp + fp == 0 or tp + fn == 0 or tp == 0:
        return 0.0
    precision = tp / (tp + fp)
    recall = tp / (tp + fn)
    return float(2.0 * precision * recall / (precision + recall))


@dataclass(frozen=True)
class FoldResult:
    accuracies: list[float]
    f1_scores: list[float]
    extras: list[dict] = field(default_factory=list)

    @property
    def mean_accuracy(self) -> float:
        return float(np.mean(self.accuracies))

    @property
    def mean_f1(self) -> float:
        return float(np.mean(self.f1_scores))


def evaluate_folds(fit_predict, folds, X, y, positive=1) -> FoldResult:
    """Run fit_predict(train_X, train_y, test_X) -> predictions on each fold.

    ``folds`` is an iterable of (train_indices, test_indices) pairs; labels
    are binary with the given positive class.
    """
    accs, f1s, extras = [], [], []
    for train_idx, test_idx in folds:
        train_idx = np.asarray(train_idx, dtype=int)
        test_idx = np.asarray(test_idx, dtype=int)
        if train_idx.size == 0 or test_idx.size == 0:
            raise EmptyFoldError("fold with no samples")
        result = fit_predict(X[train_idx], y[train_idx], X[test_idx])
        if isinstance(result, tuple):
            preds, extra = result
        else:
            preds, extra = result, {}
        accs.append(accuracy_score(y[test_idx], preds))
        f1s.append(f1_score(y[test_idx], preds, positive=positive))
        extras.append(extra)
    if len(accs) < 2:
        raise EmptyFoldError("need at least 2 folds")
    return FoldResult(accuracies=accs, f1_scores=f1s, extras=extras)
