import numpy as np
import pytest

from qpga import manifold
from qpga.errors import (
    AntipodalPointError,
    DegenerateInputError,
    DimensionMismatchError,
    NonTangentError,
)
from qpga.manifold import (
    FrechetConfig,
    SpherePoint,
    TangentVector,
    exp_map,
    frechet_mean,
    geodesic_distance,
    log_map,
    log_map_many,
)


def unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


def random_sphere(rng, n, dim):
    return np.array([unit(rng.normal(size=dim)) for _ in range(n)])


E1 = np.array([1.0, 0.0, 0.0])
E2 = np.array([0.0, 1.0, 0.0])


class TestLogMap:
    def test_identity_point_gives_zero(self):
        assert np.array_equal(log_map(E1, E1), np.zeros(3))

    def test_orthogonal_pair(self):
        np.testing.assert_allclose(log_map(E1, E2), (np.pi / 2) * E2, atol=1e-12)

    def test_midpoint_of_e1_e2(self):
        v = log_map(E1, unit(E1 + E2))
        np.testing.assert_allclose(v, (np.pi / 4) * E2, atol=1e-12)
        assert abs(np.linalg.norm(v) - np.arccos(1 / np.sqrt(2))) < 1e-12

    def test_antipodal_raises(self):
        with pytest.raises(AntipodalPointError):
            log_map(E1, -E1)

    def test_output_is_tangent(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            mu, x = random_sphere(rng, 2, 8)
            v = log_map(mu, x)
            assert abs(v @ mu) < 1e-9

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            log_map(E1, np.array([1.0, 0.0]))

    def test_many_matches_single(self):
        rng = np.random.default_rng(1)
        mu = unit(rng.normal(size=16))
        X = random_sphere(rng, 20, 16)
        V = log_map_many(mu, X)
        for i in range(20):
            np.testing.assert_allclose(V[i], log_map(mu, X[i]), atol=1e-12)

    def test_many_zeroes_rows_at_mu(self):
        rng = np.random.default_rng(2)
        mu = unit(rng.normal(size=5))
        X = np.vstack([mu, random_sphere(rng, 3, 5)])
        V = log_map_many(mu, X)
        assert np.array_equal(V[0], np.zeros(5))


class TestExpMap:
    def test_zero_vector(self):
        np.testing.assert_allclose(exp_map(E1, np.zeros(3)), E1)

    def test_quarter_turn(self):
        np.testing.assert_allclose(exp_map(E1, (np.pi / 2) * E2), E2, atol=1e-12)

    def test_round_trip(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            mu, x = random_sphere(rng, 2, 12)
            err = geodesic_distance(exp_map(mu, log_map(mu, x)), x)
            assert err < 1e-9

    def test_output_unit_norm(self):
        rng = np.random.default_rng(4)
        mu = unit(rng.normal(size=7))
        v = rng.normal(size=7)
        v = v - (v @ mu) * mu
        assert abs(np.linalg.norm(exp_map(mu, v)) - 1.0) < 1e-12

    def test_non_tangent_raises(self):
        with pytest.raises(NonTangentError):
            exp_map(E1, np.array([1.0, 1.0, 0.0]))


class TestGeodesicDistance:
    def test_self_distance_zero(self):
        assert geodesic_distance(E1, E1) == 0.0

    def test_antipodal_pi(self):
        assert abs(geodesic_distance(E1, -E1) - np.pi) < 1e-12

    def test_quarter_arc(self):
        assert abs(geodesic_distance(E1, unit(E1 + E2)) - np.pi / 4) < 1e-12

    def test_symmetry_and_triangle(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            a, b, c = random_sphere(rng, 3, 6)
            assert abs(geodesic_distance(a, b) - geodesic_distance(b, a)) < 1e-12
            assert geodesic_distance(a, c) <= (
                geodesic_distance(a, b) + geodesic_distance(b, c) + 1e-12
            )


class TestFrechetMean:
    def test_single_point(self):
        rng = np.random.default_rng(6)
        x = unit(rng.normal(size=9))
        np.testing.assert_allclose(frechet_mean([x]), x)

    def test_two_point_closed_form(self):
        mu = frechet_mean([E1, E2])
        np.testing.assert_allclose(mu, unit(E1 + E2), atol=1e-9)

    def test_permutation_invariance(self):
        rng = np.random.default_rng(7)
        X = random_sphere(rng, 12, 5)
        mu1 = frechet_mean(X)
        mu2 = frechet_mean(X[::-1])
        assert geodesic_distance(mu1, mu2) < 1e-9

    def test_first_order_condition(self):
        # At the Karcher mean the mean log vector vanishes.
        rng = np.random.default_rng(8)
        X = random_sphere(rng, 30, 10)
        mu = frechet_mean(X)
        assert np.linalg.norm(log_map_many(mu, X).mean(axis=0)) < 1e-9

    def test_empty_raises(self):
        with pytest.raises(DegenerateInputError):
            frechet_mean(np.empty((0, 3)))

    def test_no_convergence_raises(self):
        with pytest.raises(manifold.NoConvergenceError):
            frechet_mean(
                np.array([E1, E2, unit(E1 - E2)]),
                FrechetConfig(max_iterations=1, tolerance=1e-15),
            )


class TestValidatedTypes:
    def test_sphere_point_rejects_non_unit(self):
        with pytest.raises(DegenerateInputError):
            SpherePoint(np.array([1.0, 1.0]))

    def test_tangent_vector_rejects_non_orthogonal(self):
        base = SpherePoint(E1)
        with pytest.raises(NonTangentError):
            TangentVector(base, np.array([0.5, 1.0, 0.0]))

    def test_wrappers_accepted_by_maps(self):
        base = SpherePoint(E1)
        tv = TangentVector(base, (np.pi / 2) * E2)
        np.testing.assert_allclose(exp_map(base, tv), E2, atol=1e-12)

    def test_frechet_config_validation(self):
        with pytest.raises(ValueError):
            FrechetConfig(step_size=0.0)
        with pytest.raises(ValueError):
            FrechetConfig(tolerance=-1.0)
