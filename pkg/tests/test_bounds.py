import math

import pytest

from qpga import bounds


class TestMinQubits:
    def test_paper_values(self):
        assert bounds.min_qubits(4) == 2
        assert bounds.min_qubits(16) == 4

    def test_ceiling_of_log2(self):
        assert bounds.min_qubits(5) == 3
        assert bounds.min_qubits(1) == 0
        assert bounds.min_qubits(2) == 1

    def test_invalid_d(self):
        with pytest.raises(ValueError):
            bounds.min_qubits(0)


class TestMaxQubits:
    def test_equal_probabilities_give_one(self):
        assert bounds.max_qubits(bounds.NoiseBudget(p=0.5, p_max=0.5)) == 1
        assert bounds.max_qubits(bounds.NoiseBudget(p=0.3, p_max=0.3)) == 1

    def test_closed_form_value(self):
        # ln(0.95)/ln(0.99) = 5.1034..., floored to 5.
        assert bounds.max_qubits(bounds.NoiseBudget(p=0.01, p_max=0.05)) == 5

    def test_noiseless_unbounded(self):
        assert bounds.max_qubits(bounds.NoiseBudget(p=0.0, p_max=0.1)) is None

    def test_matches_float_formula_on_grid(self):
        for p in (0.001, 0.01, 0.05, 0.2):
            for p_max in (0.01, 0.1, 0.3, 0.6):
                got = bounds.max_qubits(bounds.NoiseBudget(p=p, p_max=p_max))
                ratio = math.log1p(-p_max) / math.log1p(-p)
                assert got in (math.floor(ratio), round(ratio))

    def test_budget_validation(self):
        with pytest.raises(ValueError):
            bounds.NoiseBudget(p=1.0, p_max=0.5)
        with pytest.raises(ValueError):
            bounds.NoiseBudget(p=0.1, p_max=0.0)


class TestSystemError:
    def test_single_qubit_is_p(self):
        assert abs(bounds.system_error(0.1, 1) - 0.1) < 1e-15

    def test_monotone_in_qubits(self):
        vals = [bounds.system_error(0.05, q) for q in range(8)]
        assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_zero_qubits_zero_error(self):
        assert bounds.system_error(0.3, 0) == 0.0


class TestFeasibleQubitRange:
    def test_feasible_composition(self):
        qb = bounds.feasible_qubit_range(
            (4.0, 3.0, 2.0, 1.0), 0.6, bounds.NoiseBudget(p=0.01, p_max=0.05)
        )
        assert (qb.q_min, qb.q_max, qb.feasible) == (1, 5, True)

    def test_boundary_feasible(self):
        qb = bounds.feasible_qubit_range(
            (4.0, 3.0, 2.0, 1.0), 0.6, bounds.NoiseBudget(p=0.3, p_max=0.3)
        )
        assert qb.q_min == qb.q_max == 1 and qb.feasible

    def test_infeasible(self):
        # Four equal eigenvalues with beta = 1 force D = 4 (q_min = 2) while
        # ln(0.8)/ln(0.5) = 0.32 floors to q_max = 0.
        qb = bounds.feasible_qubit_range(
            (1.0, 1.0, 1.0, 1.0), 1.0, bounds.NoiseBudget(p=0.5, p_max=0.2)
        )
        assert qb.q_min == 2 and qb.q_max == 0 and not qb.feasible

    def test_to_dict_reports_assumption(self):
        qb = bounds.feasible_qubit_range((1.0,), 1.0, bounds.NoiseBudget(p=0.1, p_max=0.2))
        d = qb.to_dict()
        assert d["assumptions"] == bounds.ASSUMPTION
        assert set(d) >= {"q_min", "q_max", "feasible", "system_error_at_qmin"}
