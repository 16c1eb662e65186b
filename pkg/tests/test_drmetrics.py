import numpy as np
import pytest

from qpga import drmetrics
from qpga.errors import DimensionMismatchError, InvalidKError, NonUnitNormError


# ---------------------------------------------------------------------------
# Brute-force oracle: explicit per-point sorting, no vectorized tricks.


def oracle_ranks(X, kind):
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    ranks = {}
    for i in range(n):
        dists = []
        for j in range(n):
            if j == i:
                continue
            if kind == "euclidean":
                d = float(np.linalg.norm(X[i] - X[j]))
            else:
                d = float(np.arccos(np.clip(X[i] @ X[j], -1.0, 1.0)))
            dists.append((d, j))
        dists.sort()
        for r, (_, j) in enumerate(dists, start=1):
            ranks[i, j] = r
    return ranks


def oracle_coranking(X_high, X_low, kh="euclidean", kl="euclidean"):
    n = len(X_high)
    rh = oracle_ranks(X_high, kh)
    rl = oracle_ranks(X_low, kl)
    counts = np.zeros((n - 1, n - 1), dtype=int)
    for i in range(n):
        for j in range(n):
            if j != i:
                counts[rh[i, j] - 1, rl[i, j] - 1] += 1
    return counts


def oracle_trustworthiness(X_high, X_low, k, kh="euclidean", kl="euclidean"):
    n = len(X_high)
    rh = oracle_ranks(X_high, kh)
    rl = oracle_ranks(X_low, kl)
    penalty = 0
    for i in range(n):
        for j in range(n):
            if j != i and rh[i, j] <= k < rl[i, j]:
                penalty += rl[i, j] - k
    return 1.0 - 2.0 / (n * k * (2 * n - 3 * k - 1)) * penalty


FIVE_HIGH = np.array([[0.0, 0.0], [1.0, 0.1], [2.0, -0.1], [3.5, 0.0], [5.0, 0.2]])
# Low embedding with the last two points swapped.
FIVE_LOW = FIVE_HIGH[[0, 1, 2, 4, 3]]


class TestPairwiseDistances:
    def test_euclidean_hand_case(self):
        X = np.array([[0.0, 0.0], [3.0, 4.0]])
        d = drmetrics.pairwise_distances(X)
        assert abs(d[0, 1] - 5.0) < 1e-12

    def test_geodesic_requires_unit_rows(self):
        with pytest.raises(NonUnitNormError):
            drmetrics.pairwise_distances(np.array([[2.0, 0.0], [0.0, 1.0]]), "geodesic")

    def test_geodesic_values(self):
        X = np.array([[1.0, 0.0], [0.0, 1.0]])
        d = drmetrics.pairwise_distances(X, "geodesic")
        assert abs(d[0, 1] - np.pi / 2) < 1e-12


class TestRankMatrix:
    def test_tie_break_by_index(self):
        # Points 1 and 2 are equidistant from point 0: the smaller index wins.
        d = np.array([[0.0, 2.0, 2.0], [2.0, 0.0, 1.0], [2.0, 1.0, 0.0]])
        ranks = drmetrics.rank_matrix(d)
        assert ranks[0, 1] == 1 and ranks[0, 2] == 2
        assert ranks[0, 0] == 0

    def test_matches_oracle_random(self):
        rng = np.random.default_rng(0)
        X = rng.normal(size=(15, 3))
        ranks = drmetrics.rank_matrix(drmetrics.pairwise_distances(X))
        oracle = oracle_ranks(X, "euclidean")
        for (i, j), r in oracle.items():
            assert ranks[i, j] == r


class TestCorankingMatrix:
    def test_identity_all_diagonal(self):
        rng = np.random.default_rng(1)
        X = rng.normal(size=(20, 4))
        cm = drmetrics.coranking_matrix(X, X)
        assert np.trace(cm.counts) == 20 * 19
        assert cm.counts.sum() == 20 * 19

    def test_four_collinear_hand_case(self):
        high = np.array([[0.0], [1.0], [3.0], [6.0]])
        low = np.array([[0.0], [4.0], [5.0], [6.0]])
        cm = drmetrics.coranking_matrix(high, low)
        np.testing.assert_array_equal(cm.counts, oracle_coranking(high, low))

    def test_entries_sum_on_random_data(self):
        rng = np.random.default_rng(2)
        high = rng.normal(size=(12, 5))
        low = rng.normal(size=(12, 2))
        cm = drmetrics.coranking_matrix(high, low)
        assert cm.counts.sum() == 12 * 11
        np.testing.assert_array_equal(cm.counts, oracle_coranking(high, low))

    def test_row_count_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            drmetrics.coranking_matrix(np.zeros((4, 2)), np.zeros((5, 2)))


class TestTrustworthinessContinuity:
    def test_identity_is_one(self):
        rng = np.random.default_rng(3)
        X = rng.normal(size=(30, 4))
        for k in (1, 5, 10):
            assert drmetrics.trustworthiness(X, X, k) == 1.0
            assert drmetrics.continuity(X, X, k) == 1.0

    def test_five_point_hand_case(self):
        for k in (1, 2):
            got = drmetrics.trustworthiness(FIVE_HIGH, FIVE_LOW, k)
            want = oracle_trustworthiness(FIVE_HIGH, FIVE_LOW, k)
            assert abs(got - want) < 1e-12

    def test_continuity_duality(self):
        rng = np.random.default_rng(4)
        high = rng.normal(size=(20, 5))
        low = rng.normal(size=(20, 2))
        for k in (1, 3, 7):
            assert drmetrics.continuity(high, low, k) == drmetrics.trustworthiness(low, high, k)
            want = oracle_trustworthiness(low, high, k)
            assert abs(drmetrics.continuity(high, low, k) - want) < 1e-12

    def test_invalid_k(self):
        X = np.zeros((10, 2))
        with pytest.raises(InvalidKError):
            drmetrics.trustworthiness(X, X, 5)  # k must be < n/2
        with pytest.raises(InvalidKError):
            drmetrics.trustworthiness(X, X, 0)

    def test_scaled_embedding_preserves_ranks(self):
        # Any rank-preserving map (here: a global rotation plus uniform
        # shrink) scores T(k) = C(k) = 1 exactly.
        rng = np.random.default_rng(5)
        X = rng.normal(size=(40, 4))
        Q, _ = np.linalg.qr(rng.normal(size=(4, 4)))
        Z = 0.25 * X @ Q
        for k in (1, 5, 15):
            assert drmetrics.trustworthiness(X, Z, k) == 1.0
            assert drmetrics.continuity(X, Z, k) == 1.0


class TestReconstructionError:
    def test_zero_for_identical(self):
        X = np.eye(3)
        assert drmetrics.reconstruction_error(X, X) == 0.0

    def test_orthogonal_pair(self):
        X = np.array([[1.0, 0.0]])
        Y = np.array([[0.0, 1.0]])
        assert abs(drmetrics.reconstruction_error(X, Y) - (np.pi / 2) ** 2) < 1e-12

    def test_requires_unit_rows(self):
        with pytest.raises(NonUnitNormError):
            drmetrics.reconstruction_error(np.array([[2.0, 0.0]]), np.array([[1.0, 0.0]]))
