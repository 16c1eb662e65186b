"""Qubit-count bounds for encoding a D-component latent space on noisy
hardware, assuming independent per-qubit errors.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .pga import components_for_variance

ASSUMPTION = "independent-qubit-errors"

# Relative guard applied before flooring the noise-budget ratio, so values
# that are an integer up to rounding noise land on that integer.
_FLOOR_GUARD = 1e-12


@dataclass(frozen=True)
class NoiseBudget:
    p: float       # per-qubit error probability
    p_max: float   # maximum acceptable system error

    def __post_init__(self):
        if not 0.0 <= self.p < 1.0:
            raise ValueError("p must be in [0, 1)")
        if not 0.0 < self.p_max < 1.0:
            raise ValueError("p_max must be in (0, 1)")


@dataclass(frozen=True)
class QubitBudget:
    q_min: int
    q_max: int | None        # None means unbounded (noiseless)
    feasible: bool
    system_error_at_qmin: float

    def to_dict(self) -> dict:
        return {
            "q_min": self.q_min,
            "q_max": self.q_max,
            "feasible": self.feasible,
            "system_error_at_qmin": self.system_error_at_qmin,
            "assumptions": ASSUMPTION,
        }


def min_qubits(D: int) -> int:
    """ceil(log2 D) in exact integer arithmetic; D = 1 gives 0."""
    if D < 1:
        raise ValueError("D must be >= 1")
    return (D - 1).bit_length()


def max_qubits(budget: NoiseBudget) -> int | None:
    """floor(ln(1 - p_max) / ln(1 - p)); None when p = 0 (no noise ceiling)."""
    if budget.p == 0.0:
        return None
    ratio = math.log1p(-budget.p_max) / math.log1p(-budget.p)
    nearest = round(ratio)
    if abs(ratio - nearest) <= _FLOOR_GUARD * max(abs(ratio), 1.0):
        return int(nearest)
    return int(math.floor(ratio))


def system_error(p: float, q: int) -> float:
    """Probability of at least one erroneous qubit among q independent qubits."""
    return 1.0 - (1.0 - p) ** q


def feasible_qubit_range(eigenvalues, beta: float, budget: NoiseBudget) -> QubitBudget:
    """Combine the variance-driven lower bound with the noise-driven upper
    bound into a feasibility verdict."""
    D = components_for_variance(eigenvalues, beta)
    q_min = min_qubits(D)
    q_max = max_qubits(budget)
    feasible = q_max is None or q_min <= q_max
    return QubitBudget(
        q_min=q_min,
        q_max=q_max,
        feasible=feasible,
        system_error_at_qmin=system_error(budget.p, q_min),
    )
