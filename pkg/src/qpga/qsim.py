"""Minimal dense quantum simulator.

Pure states are complex statevectors over 2^q basis states; the noisy path
uses an exact density-matrix representation with depolarizing channels after
each gate. Qubit 0 is the most significant bit of the basis index.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    IndexOutOfRangeError,
    NoiseOnPureStateError,
    TooManyAmplitudesError,
    UnsupportedGateError,
    ZeroVectorError,
)

ROTATION_KINDS = ("RX", "RY", "RZ")
GATE_KINDS = ROTATION_KINDS + ("CZ", "CX")

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_CZ = np.diag([1, 1, 1, -1]).astype(complex)
_CX = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)


@dataclass(frozen=True)
class GateOp:
    kind: str
    targets: tuple[int, ...]
    angle: float | None = None
    param: int | None = None  # index into a parameter vector, for templates

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise UnsupportedGateError(f"unknown gate kind {self.kind!r}")
        targets = tuple(int(t) for t in self.targets)
        if len(set(targets)) != len(targets):
            raise IndexOutOfRangeError("gate targets must be distinct")
        want = 1 if self.kind in ROTATION_KINDS else 2
        if len(targets) != want:
            raise IndexOutOfRangeError(f"{self.kind} takes {want} target(s)")
        object.__setattr__(self, "targets", targets)


@dataclass(frozen=True)
class NoiseSpec:
    p1: float = 0.0
    p2: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.p1 <= 1.0 and 0.0 <= self.p2 <= 1.0):
            raise ValueError("depolarizing probabilities must be in [0, 1]")


@dataclass(frozen=True)
class QuantumState:
    amplitudes: np.ndarray
    q: int

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (2**self.q,):
            raise DimensionMismatchError("amplitude count must be 2^q")
        if abs(np.sum(np.abs(amps) ** 2) - 1.0) > 1e-9:
            raise ZeroVectorError("state is not normalized")
        object.__setattr__(self, "amplitudes", amps)


@dataclass(frozen=True)
class DensityMatrix:
    rho: np.ndarray
    q: int

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=complex)
        if rho.shape != (2**self.q, 2**self.q):
            raise DimensionMismatchError("density matrix must be 2^q x 2^q")
        object.__setattr__(self, "rho", rho)

    @classmethod
    def from_state(cls, state: QuantumState) -> "DensityMatrix":
        return cls(np.outer(state.amplitudes, state.amplitudes.conj()), state.q)


def _check_unitary(U: np.ndarray):
    err = np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0])))
    if err > 1e-12:
        raise UnsupportedGateError(f"gate matrix is not unitary (deviation {err:.2e})")


def gate_matrix(op: GateOp) -> np.ndarray:
    if op.kind in ROTATION_KINDS:
        if op.angle is None:
            raise UnsupportedGateError("rotation gate has no bound angle")
        half = op.angle / 2.0
        c, s = np.cos(half), np.sin(half)
        if op.kind == "RX":
            U = np.array([[c, -1j * s], [-1j * s, c]])
        elif op.kind == "RY":
            U = np.array([[c, -s], [s, c]], dtype=complex)
        else:
            U = np.diag([np.exp(-1j * half), np.exp(1j * half)])
    elif op.kind == "CZ":
        U = _CZ
    else:
        U = _CX
    _check_unitary(U)
    return U


def amplitude_encode(x, q: int) -> QuantumState:
    """Normalize x, zero-pad to 2^q amplitudes, and load it as a pure state."""
    x = np.asarray(x, dtype=float).ravel()
    dim = 2**q
    if x.shape[0] > dim:
        raise TooManyAmplitudesError(f"{x.shape[0]} amplitudes > 2^{q}")
    norm = np.linalg.norm(x)
    if norm < 1e-12:
        raise ZeroVectorError("cannot encode the zero vector")
    amps = np.zeros(dim, dtype=complex)
    amps[: x.shape[0]] = x / norm
    return QuantumState(amps, q)


def _apply_unitary_tensor(tensor: np.ndarray, U: np.ndarray, axes: tuple[int, ...]) -> np.ndarray:
    """Apply a (2^k x 2^k) unitary to the given k axes of a (2,)*r tensor."""
    k = len(axes)
    Ut = U.reshape((2,) * (2 * k))
    out = np.tensordot(Ut, tensor, axes=(tuple(range(k, 2 * k)), axes))
    return np.moveaxis(out, tuple(range(k)), axes)


def _apply_gate_state(amps: np.ndarray, q: int, op: GateOp) -> np.ndarray:
    U = gate_matrix(op)
    tensor = amps.reshape((2,) * q)
    tensor = _apply_unitary_tensor(tensor, U, op.targets)
    return tensor.reshape(-1)


def _apply_matrix_rho(rho: np.ndarray, q: int, U: np.ndarray, targets: tuple[int, ...]) -> np.ndarray:
    tensor = rho.reshape((2,) * (2 * q))
    tensor = _apply_unitary_tensor(tensor, U, targets)
    col_axes = tuple(q + t for t in targets)
    tensor = _apply_unitary_tensor(tensor, U.conj(), col_axes)
    return tensor.reshape(2**q, 2**q)


def depolarize(rho: np.ndarray, q: int, targets: tuple[int, ...], p: float) -> np.ndarray:
    """Uniform Pauli twirl on the target qubit(s): weight p/3 per Pauli on one
    qubit, p/15 per non-identity Pauli pair on two."""
    if p == 0.0:
        return rho
    paulis = (_X, _Y, _Z)
    if len(targets) == 1:
        out = (1.0 - p) * rho
        for P in paulis:
            out = out + (p / 3.0) * _apply_matrix_rho(rho, q, P, targets)
        return out
    out = (1.0 - p) * rho
    singles = (_I2, _X, _Y, _Z)
    for a, Pa in enumerate(singles):
        for b, Pb in enumerate(singles):
            if a == 0 and b == 0:
                continue
            P = np.kron(Pa, Pb)
            out = out + (p / 15.0) * _apply_matrix_rho(rho, q, P, targets)
    return out


def _check_targets(op: GateOp, q: int):
    for t in op.targets:
        if not 0 <= t < q:
            raise IndexOutOfRangeError(f"target {t} out of range for {q} qubits")


def evolve(state_or_rho, circuit, noise: NoiseSpec | None = None):
    """Run a gate sequence. Pure states evolve unitarily; density matrices
    additionally get a depolarizing channel on each gate's targets."""
    if isinstance(state_or_rho, QuantumState):
        if noise is not None and (noise.p1 > 0 or noise.p2 > 0):
            raise NoiseOnPureStateError("noise requires the density-matrix backend")
        amps = state_or_rho.amplitudes.copy()
        q = state_or_rho.q
        for op in circuit:
            _check_targets(op, q)
            amps = _apply_gate_state(amps, q, op)
        return QuantumState(amps, q)
    if isinstance(state_or_rho, DensityMatrix):
        rho = state_or_rho.rho.copy()
        q = state_or_rho.q
        for op in circuit:
            _check_targets(op, q)
            rho = _apply_matrix_rho(rho, q, gate_matrix(op), op.targets)
            if noise is not None:
                p = noise.p1 if len(op.targets) == 1 else noise.p2
                rho = depolarize(rho, q, op.targets, p)
        return DensityMatrix(rho, q)
    raise DimensionMismatchError("expected QuantumState or DensityMatrix")


def expectation_x_all(state_or_rho) -> float:
    """Expectation of X tensored over every qubit."""
    if isinstance(state_or_rho, QuantumState):
        amps = state_or_rho.amplitudes
        flipped = amps[::-1]  # X^q reverses the basis index (bitwise complement)
        return float(np.real(np.vdot(amps, flipped)))
    if isinstance(state_or_rho, DensityMatrix):
        rho = state_or_rho.rho
        dim = rho.shape[0]
        return float(np.real(np.sum(rho[np.arange(dim)[::-1], np.arange(dim)])))
    raise DimensionMismatchError("expected QuantumState or DensityMatrix")


def _householder_to_e0(y: np.ndarray) -> np.ndarray:
    """Real orthogonal matrix mapping e0 to y (unit vector)."""
    dim = y.shape[0]
    e0 = np.zeros(dim)
    e0[0] = 1.0
    w = y - e0
    nw = np.linalg.norm(w)
    if nw < 1e-12:
        return np.eye(dim)
    return np.eye(dim) - 2.0 * np.outer(w, w) / (nw * nw)


def quantum_kernel(x, y, backend: str = "analytic") -> float:
    """Squared overlap of the amplitude-encoded states of x and y.

    'analytic' evaluates (x.y)^2 directly; 'circuit' prepares x, applies the
    adjoint of an encoding unitary for y, and reads the all-zeros probability.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise DimensionMismatchError(f"shapes {x.shape} and {y.shape} differ")
    if backend == "analytic":
        return float(x @ y) ** 2
    if backend != "circuit":
        raise ValueError(f"unknown backend {backend!r}")
    q = max(1, int(np.ceil(np.log2(x.shape[0]))))
    state = amplitude_encode(x, q)
    y_padded = np.zeros(2**q)
    y_padded[: y.shape[0]] = y / np.linalg.norm(y)
    U = _householder_to_e0(y_padded)
    amp0 = U.T @ state.amplitudes
    return float(np.abs(amp0[0]) ** 2)


def bind_parameters(template, params) -> list[GateOp]:
    """Resolve a parameterized template into concrete gates."""
    params = np.asarray(params, dtype=float)
    bound = []
    for op in template:
        if op.param is not None:
            if op.kind not in ROTATION_KINDS:
                raise UnsupportedGateError("only rotation gates may be parameterized")
            if not 0 <= op.param < params.shape[0]:
                raise IndexOutOfRangeError(f"parameter index {op.param} out of range")
            bound.append(GateOp(op.kind, op.targets, angle=float(params[op.param])))
        else:
            bound.append(op)
    return bound


def parameter_shift_gradient(circuit_template, params, input_state, noise: NoiseSpec | None = None) -> np.ndarray:
    """Exact gradient of <X...X> w.r.t. each rotation angle via +-pi/2 shifts."""
    params = np.asarray(params, dtype=float)

    def f(theta):
        return expectation_x_all(evolve(input_state, bind_parameters(circuit_template, theta), noise))

    grad = np.zeros_like(params)
    for i in range(params.shape[0]):
        plus = params.copy()
        minus = params.copy()
        plus[i] += np.pi / 2
        minus[i] -= np.pi / 2
        grad[i] = 0.5 * (f(plus) - f(minus))
    return grad
