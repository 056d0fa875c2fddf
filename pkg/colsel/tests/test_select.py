"""
Unit tests for the single-machine selectors.
"""

import math
import unittest

import numpy as np

from colsel.algorithms.matcore import ColumnMatrix
from colsel.algorithms.objective import coverage_naive
from colsel.algorithms.oracle import brute_force_opt, make_random_instance, make_tight_example
from colsel.algorithms.select import (
    LazierParams,
    evaluate_exact,
    greedy,
    lazier_greedy,
    guarantee_budget,
    pick_best,
    random_baseline,
)
from colsel.errors import DimensionMismatchError, InvalidParameterError

DEPENDENT_A = ColumnMatrix([[1.0, 0.0, 1.0], [1.0, -1.0, 0.0], [0.0, 1.0, 1.0]])


class TestGreedy(unittest.TestCase):
    """Test plain greedy selection."""

    def test_dependent_instance(self):
        """All first-pick gains tie at 3.0; the lowest index wins."""
        result = greedy(DEPENDENT_A, DEPENDENT_A, 2)
        self.assertEqual(result.chosen.to_list(), [0, 1])
        self.assertAlmostEqual(result.final_coverage, 6.0, delta=1e-12)
        self.assertAlmostEqual(result.coverage_ratio, 1.0, delta=1e-12)
        self.assertEqual(result.method, "greedy")

    def test_early_stop(self):
        b = ColumnMatrix([[0.0, 1.0, 0.0], [0.0, 0.0, 0.0]])
        result = greedy(ColumnMatrix([[1.0], [1.0]]), b, 3)
        self.assertEqual(result.chosen.to_list(), [1])
        self.assertEqual(len(result.coverage_trace), 1)

    def test_tight_example_after_four_picks(self):
        a, b = make_tight_example(6, 0.5)
        result = greedy(a, b, 4)
        self.assertAlmostEqual(result.final_coverage, 0.8, delta=1e-9)

    def test_trace_is_monotone(self):
        a, b = make_random_instance(8, 6, 9, 3, seed=4, noise=0.1, candidate_pool="gaussian")
        trace = greedy(a, b, 6).coverage_trace
        self.assertTrue(all(x <= y for x, y in zip(trace, trace[1:])))

    def test_committed_gain_is_largest(self):
        """Each step's coverage increase is at least every candidate's recomputed gain."""
        a, b = make_random_instance(8, 6, 9, 3, seed=13, noise=0.1, candidate_pool="gaussian")
        result = greedy(a, b, 5)
        dense_b = b.to_dense()
        previous = 0.0
        for step, value in enumerate(result.coverage_trace):
            prefix = result.chosen.to_list()[:step]
            for j in range(b.cols):
                if j in prefix:
                    continue
                gain = coverage_naive(a, dense_b[:, prefix + [j]]) - previous
                self.assertGreaterEqual(value - previous, gain - 1e-9)
            previous = value

    def test_invalid_inputs(self):
        with self.assertRaises(InvalidParameterError):
            greedy(DEPENDENT_A, DEPENDENT_A, 0)
        with self.assertRaises(DimensionMismatchError):
            greedy(DEPENDENT_A, ColumnMatrix(np.ones((2, 2))), 1)

    def test_pick_best_tie_tolerance(self):
        self.assertEqual(pick_best([4, 2, 7], np.array([3.0, 3.0 - 1e-15, 1.0]), 1e-12), 2)
        self.assertEqual(pick_best([4, 2], np.array([3.0, 2.9]), 1e-12), 4)

    def test_quality_bound_with_guarantee_budget(self):
        epsilon = 0.25
        for seed in range(5):
            a, b = make_random_instance(10, 8, 8, 4, seed=seed, noise=0.1)
            opt = brute_force_opt(a, b, 2)
            r = guarantee_budget(2, epsilon, opt.spectrum.sigma_min, cap=b.cols)
            self.assertGreaterEqual(greedy(a, b, r).final_coverage, (1 - epsilon) * opt.opt_value - 1e-9)


class TestLazierGreedy(unittest.TestCase):
    """Test lazier-than-lazy greedy."""

    def test_full_sample_equals_greedy(self):
        a, b = make_random_instance(9, 7, 10, 4, seed=2, noise=0.05, candidate_pool="gaussian")
        lazy = lazier_greedy(a, b, 5, LazierParams(delta=0.5, sample_size_override=b.cols), seed=8)
        self.assertEqual(lazy.chosen, greedy(a, b, 5).chosen)

    def test_dependent_instance(self):
        result = lazier_greedy(DEPENDENT_A, DEPENDENT_A, 2, LazierParams(delta=0.01), seed=123)
        self.assertAlmostEqual(result.final_coverage, 6.0, delta=1e-12)

    def test_sample_size(self):
        params = LazierParams(delta=0.25)
        self.assertEqual(params.sample_size(12, 3), math.ceil(12 * math.log(4) / 3))
        self.assertEqual(LazierParams(delta=0.5, sample_size_override=2).sample_size(100, 1), 2)

    def test_evaluation_cap(self):
        a, b = make_random_instance(10, 12, 12, 5, seed=6, noise=0.1)
        params = LazierParams(delta=0.25, k=2)
        result = lazier_greedy(a, b, 6, params, seed=1)
        self.assertLessEqual(result.gain_evaluations, 6 * params.sample_size(12, 2))

    def test_deterministic(self):
        a, b = make_random_instance(10, 12, 12, 5, seed=6, noise=0.1)
        params = LazierParams(delta=0.25, k=2)
        first = lazier_greedy(a, b, 4, params, seed=99)
        second = lazier_greedy(a, b, 4, params, seed=99)
        self.assertEqual(first.chosen, second.chosen)
        self.assertEqual(first.coverage_trace, second.coverage_trace)

    def test_invalid_delta(self):
        with self.assertRaises(InvalidParameterError):
            LazierParams(delta=1.0)

    def test_mean_quality_bound(self):
        """Mean over seeds reaches (1 - eps - delta) f(OPT_k)."""
        epsilon = delta = 0.25
        a, b = make_random_instance(10, 8, 8, 4, seed=21, noise=0.1)
        opt = brute_force_opt(a, b, 3)
        r = guarantee_budget(3, epsilon, opt.spectrum.sigma_min, cap=b.cols)
        params = LazierParams(delta=delta, k=3)
        values = [lazier_greedy(a, b, r, params, seed=s).final_coverage for s in range(200)]
        self.assertGreaterEqual(float(np.mean(values)), (1 - epsilon - delta) * opt.opt_value)


class TestRandomBaseline(unittest.TestCase):
    """Test the uniform random selector."""

    def test_full_selection(self):
        a, b = make_random_instance(6, 5, 7, 3, seed=1, candidate_pool="gaussian")
        result = random_baseline(a, b, b.cols, seed=3)
        self.assertEqual(sorted(result.chosen), list(range(b.cols)))
        self.assertAlmostEqual(result.final_coverage, coverage_naive(a, b.to_dense()), delta=1e-9)

    def test_zero_budget(self):
        with self.assertRaises(InvalidParameterError):
            random_baseline(DEPENDENT_A, DEPENDENT_A, 0, seed=0)

    def test_budget_above_pool(self):
        with self.assertRaises(InvalidParameterError):
            random_baseline(DEPENDENT_A, DEPENDENT_A, 4, seed=0)

    def test_deterministic(self):
        self.assertEqual(random_baseline(DEPENDENT_A, DEPENDENT_A, 2, seed=5).chosen,
                         random_baseline(DEPENDENT_A, DEPENDENT_A, 2, seed=5).chosen)


class TestHelpers(unittest.TestCase):
    def test_guarantee_budget(self):
        self.assertEqual(guarantee_budget(2, 0.25, 0.5), 256)
        self.assertEqual(guarantee_budget(2, 0.25, 0.5, cap=10), 10)
        self.assertEqual(guarantee_budget(1, 0.5, 0.0, cap=7), 7)
        with self.assertRaises(InvalidParameterError):
            guarantee_budget(1, 0.5, 0.0)

    def test_evaluate_exact_recomputes_trace(self):
        result = greedy(DEPENDENT_A, DEPENDENT_A, 2)
        exact = evaluate_exact(DEPENDENT_A, DEPENDENT_A, result)
        self.assertEqual(exact.chosen, result.chosen)
        for x, y in zip(exact.coverage_trace, result.coverage_trace):
            self.assertAlmostEqual(x, y, delta=1e-12)


if __name__ == "__main__":
    unittest.main()
