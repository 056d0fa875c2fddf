"""
Unit tests for the brute-force oracle and instance generators.
"""

import math
import unittest

import numpy as np

from colsel.algorithms.matcore import ColumnMatrix, ColumnSet, frobenius_sq
from colsel.algorithms.objective import coverage_naive
from colsel.algorithms.oracle import (
    brute_force_opt,
    jacobi_eigenvalues,
    make_random_instance,
    make_tight_example,
    pca_upper_bound,
    spectrum,
    tight_example_coverage,
)
from colsel.algorithms.select import greedy
from colsel.errors import GuardExceededError, InvalidParameterError

DEPENDENT_A = ColumnMatrix([[1.0, 0.0, 1.0], [1.0, -1.0, 0.0], [0.0, 1.0, 1.0]])


class TestBruteForce(unittest.TestCase):
    """Test exhaustive OPT_k."""

    def test_dependent_pair(self):
        """Every pair spans the column space; the lexicographic first wins."""
        opt = brute_force_opt(DEPENDENT_A, DEPENDENT_A, 2)
        self.assertEqual(opt.opt_set.to_list(), [0, 1])
        self.assertAlmostEqual(opt.opt_value, 6.0, delta=1e-12)
        self.assertEqual(opt.subsets_evaluated, 3)

    def test_dependent_single(self):
        self.assertAlmostEqual(brute_force_opt(DEPENDENT_A, DEPENDENT_A, 1).opt_value, 3.0, delta=1e-12)

    def test_all_columns(self):
        a, b = make_random_instance(5, 4, 6, 2, seed=3, candidate_pool="gaussian")
        opt = brute_force_opt(a, b, 6)
        self.assertAlmostEqual(opt.opt_value, coverage_naive(a, b.to_dense()), delta=1e-9)

    def test_dominates_selectors(self):
        """No selector with the same budget beats OPT_k, and PCA bounds OPT_k."""
        for seed in range(5):
            a, b = make_random_instance(7, 6, 6, 3, seed=seed, noise=0.2)
            opt = brute_force_opt(a, b, 2)
            self.assertGreaterEqual(opt.opt_value, greedy(a, b, 2).final_coverage - 1e-9)
            self.assertGreaterEqual(pca_upper_bound(a, 2), opt.opt_value - 1e-8)

    def test_guard(self):
        b = ColumnMatrix(np.random.default_rng(0).standard_normal((4, 30)))
        with self.assertRaises(GuardExceededError):
            brute_force_opt(b, b, 15)
        with self.assertRaises(GuardExceededError):
            brute_force_opt(DEPENDENT_A, DEPENDENT_A, 2, limit=2)

    def test_invalid_k(self):
        with self.assertRaises(InvalidParameterError):
            brute_force_opt(DEPENDENT_A, DEPENDENT_A, 4)


class TestSpectrum(unittest.TestCase):
    """Test spectrum statistics of normalized column sets."""

    def test_orthonormal(self):
        stats = spectrum(ColumnMatrix(np.eye(3)), ColumnSet((0, 2)))
        self.assertAlmostEqual(stats.sigma_min, 1.0, delta=1e-12)
        self.assertAlmostEqual(stats.sigma_max, 1.0, delta=1e-12)
        self.assertAlmostEqual(stats.kappa, 1.0, delta=1e-12)

    def test_duplicate_column(self):
        b = ColumnMatrix([[1.0, 2.0], [1.0, 2.0]])
        stats = spectrum(b, ColumnSet((0, 1)))
        self.assertEqual(stats.sigma_min, 0.0)
        self.assertTrue(math.isinf(stats.kappa))

    def test_sixty_degrees(self):
        b = ColumnMatrix([[1.0, 0.5], [0.0, math.sqrt(3) / 2]])
        stats = spectrum(b, ColumnSet((0, 1)))
        self.assertAlmostEqual(stats.sigma_min, 0.5, delta=1e-12)
        self.assertAlmostEqual(stats.sigma_max, 1.5, delta=1e-12)

    def test_trace_identity(self):
        b = ColumnMatrix(np.random.default_rng(8).standard_normal((7, 5)) * [1.0, 3.0, 0.2, 5.0, 1.0])
        stats = spectrum(b, ColumnSet((0, 1, 2, 3, 4)))
        self.assertAlmostEqual(sum(stats.eigenvalues), 5.0, delta=1e-9)

    def test_jacobi_matches_numpy(self):
        rng = np.random.default_rng(1)
        m = rng.standard_normal((6, 6))
        sym = m + m.T
        np.testing.assert_allclose(jacobi_eigenvalues(sym), np.linalg.eigvalsh(sym), atol=1e-10)


class TestTightExample(unittest.TestCase):
    """Test the instance on which greedy is slow."""

    def test_shape(self):
        a, b = make_tight_example(6, 0.5)
        self.assertEqual(a.shape, (7, 1))
        self.assertEqual(b.shape, (7, 7))

    def test_two_columns_cover_target(self):
        a, b = make_tight_example(6, 0.3)
        self.assertAlmostEqual(coverage_naive(a, b.submatrix([0, 1]).to_dense()), 1.0, delta=1e-12)

    def test_coverage_formula(self):
        self.assertAlmostEqual(tight_example_coverage(0.5, 1), 0.5)
        a, b = make_tight_example(12, 0.3)
        result = greedy(a, b, 8)
        for t in range(1, 9):
            self.assertAlmostEqual(result.coverage_trace[t - 1], tight_example_coverage(0.3, t), delta=1e-9)
        self.assertNotIn(0, result.chosen)
        self.assertNotIn(1, result.chosen)

    def test_invalid_theta(self):
        with self.assertRaises(InvalidParameterError):
            make_tight_example(6, 1.0)


class TestPcaBound(unittest.TestCase):
    """Test the top-k singular value bound."""

    def test_identity(self):
        self.assertAlmostEqual(pca_upper_bound(ColumnMatrix(np.eye(3)), 2), 2.0, delta=1e-9)

    def test_rank_one(self):
        a = ColumnMatrix(np.outer([1.0, 2.0, 3.0], [1.0, -1.0]))
        self.assertAlmostEqual(pca_upper_bound(a, 1), frobenius_sq(a), delta=1e-9)

    def test_dependent_rank_two(self):
        self.assertAlmostEqual(pca_upper_bound(DEPENDENT_A, 2), 6.0, delta=1e-9)

    def test_matches_svd(self):
        a = ColumnMatrix(np.random.default_rng(4).standard_normal((9, 6)))
        s = np.linalg.svd(a.to_dense(), compute_uv=False)
        self.assertAlmostEqual(pca_upper_bound(a, 3), float(np.sum(s[:3] ** 2)), delta=1e-6)

    def test_nearly_equal_top_values(self):
        """Top squared singular values 1.0 and 0.9998 converge without hitting the iteration cap."""
        rng = np.random.default_rng(7)
        squared = np.concatenate([[1.0, 0.9998], np.linspace(0.3, 0.01, 38)])
        u, _ = np.linalg.qr(rng.standard_normal((40, 40)))
        v, _ = np.linalg.qr(rng.standard_normal((40, 40)))
        a = ColumnMatrix(u @ np.diag(np.sqrt(squared)) @ v.T)
        self.assertAlmostEqual(pca_upper_bound(a, 1, max_iter=500), 1.0, delta=1e-8)
        self.assertAlmostEqual(pca_upper_bound(a, 2, max_iter=500), 1.9998, delta=1e-8)

    def test_guard(self):
        with self.assertRaises(GuardExceededError):
            pca_upper_bound(ColumnMatrix(np.eye(4)), 1, limit=3)


class TestRandomInstance(unittest.TestCase):
    def test_rank_one_pca(self):
        a, _ = make_random_instance(6, 5, 5, 1, seed=2)
        self.assertAlmostEqual(pca_upper_bound(a, 1), frobenius_sq(a), delta=1e-8 * frobenius_sq(a))

    def test_same_seed(self):
        first = make_random_instance(6, 5, 4, 2, seed=9, candidate_pool="gaussian")
        second = make_random_instance(6, 5, 4, 2, seed=9, candidate_pool="gaussian")
        self.assertEqual(first, second)

    def test_rank_three_opt(self):
        a, b = make_random_instance(8, 6, 6, 3, seed=12)
        opt = brute_force_opt(a, b, 3)
        self.assertAlmostEqual(opt.opt_value, frobenius_sq(a), delta=1e-8 * frobenius_sq(a))

    def test_self_pool_needs_square(self):
        with self.assertRaises(InvalidParameterError):
            make_random_instance(4, 3, 5, 2, seed=0)


if __name__ == "__main__":
    unittest.main()
