"""
Smoke tests for the acceptance suites at reduced trial counts.
"""

import tempfile
import unittest
from pathlib import Path

from colsel.algorithms.bench import SUITES, run_suite
from colsel.algorithms.report import SuiteReport
from colsel.errors import InvalidParameterError


class TestSuites(unittest.TestCase):
    """Each suite passes on a handful of trials."""

    def assertSuitePasses(self, name, trials):
        report = run_suite(name, seed=0, trials=trials)
        failed = [(c.name, c.margin, c.detail) for c in report.cases if not c.passed]
        self.assertEqual(failed, [])
        self.assertTrue(report.passed)
        self.assertGreater(len(report.cases), 0)
        return report

    def test_greedy_bound(self):
        report = self.assertSuitePasses("greedy-bound", 3)
        self.assertEqual(len(report.cases), 3)

    def test_gain_bound(self):
        self.assertSuitePasses("gain-bound", 20)

    def test_tight_example(self):
        report = self.assertSuitePasses("tight-example", 1)
        formula_cases = [c for c in report.cases if "coverage formula" in c.name]
        self.assertEqual(len(formula_cases), 16)

    def test_residual_updates(self):
        self.assertSuitePasses("residual-updates", 5)

    def test_scaling_invariance(self):
        self.assertSuitePasses("scaling-invariance", 3)

    def test_dist_bound(self):
        report = self.assertSuitePasses("dist-bound", 3)
        self.assertTrue(any("scalar identity" in c.name for c in report.cases))
        winner_cases = [c for c in report.cases if "mean winner" in c.name]
        self.assertEqual(len(winner_cases), 5)
        for case in winner_cases:
            self.assertIn("seeds=100", case.detail)

    def test_epochs(self):
        self.assertSuitePasses("epochs", 2)

    def test_lazier_bound(self):
        self.assertSuitePasses("lazier-bound", 5)

    def test_sketch_fidelity(self):
        report = self.assertSuitePasses("sketch-fidelity", 10)
        names = " ".join(c.name for c in report.cases)
        self.assertIn("PCPS", names)
        self.assertIn("set order", names)

    def test_registry(self):
        self.assertEqual(set(SUITES), {
            "greedy-bound", "gain-bound", "tight-example", "residual-updates", "dist-bound",
            "epochs", "lazier-bound", "sketch-fidelity", "scaling-invariance",
        })


class TestRunSuite(unittest.TestCase):
    def test_unknown_suite(self):
        with self.assertRaises(InvalidParameterError):
            run_suite("nope")

    def test_bad_trials(self):
        with self.assertRaises(InvalidParameterError):
            run_suite("greedy-bound", trials=0)

    def test_report_written(self):
        report = run_suite("greedy-bound", seed=1, trials=2)
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "suite.json"
            report.write(path)
            loaded = SuiteReport.model_validate_json(path.read_text(encoding="utf-8"))
        self.assertEqual(loaded.suite, "greedy-bound")
        self.assertEqual(len(loaded.cases), 2)
        for case in loaded.cases:
            self.assertAlmostEqual(case.margin, case.measured - case.bound)


if __name__ == "__main__":
    unittest.main()
