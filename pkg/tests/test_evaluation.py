"""
Unit tests for folds, metrics and the comparison report
"""
import json
import unittest

import numpy as np

from residual_augment_py.augment import iterate_rounds
from residual_augment_py.config import LearnerSpec, TaskType
from residual_augment_py.evaluation import (REPORT_SCHEMA, ComparisonReport, MetricsBundle, classification_metrics,
                                            compare, evaluate_table, fold_bounds, fold_rows, fold_seed,
                                            kfold_predict, regression_metrics)
from residual_augment_py.exceptions import EvalError, ValidationError
from residual_augment_py.ingest import FrameTable
from tests.helpers import random_table, small_augment_config

SPEC = LearnerSpec(n_trees=5, seed=1)


class TestFolds(unittest.TestCase):

    def test_contiguous_bounds(self):
        self.assertEqual(fold_bounds(10, 5), [(0, 2), (2, 4), (4, 6), (6, 8), (8, 10)])
        self.assertEqual(fold_bounds(7, 3), [(0, 3), (3, 5), (5, 7)])
        self.assertEqual(fold_bounds(4, 4), [(0, 1), (1, 2), (2, 3), (3, 4)])

    def test_invalid_fold_counts(self):
        with self.assertRaises(ValidationError):
            fold_bounds(3, 5)
        with self.assertRaises(ValidationError):
            fold_bounds(10, 1)

    def test_membership_ignores_seed_unless_shuffled(self):
        for a, b in zip(fold_rows(11, 3, seed=1), fold_rows(11, 3, seed=99)):
            np.testing.assert_array_equal(a, b)
        shuffled = fold_rows(11, 3, shuffle=True, seed=1)
        self.assertEqual(sorted(np.concatenate(shuffled).tolist()), list(range(11)))

    def test_fold_seeds_differ_per_fold(self):
        self.assertEqual(fold_seed(42, 0), fold_seed(42, 0))
        self.assertNotEqual(fold_seed(42, 0), fold_seed(42, 1))


class TestKFoldPredict(unittest.TestCase):

    def test_constant_target(self):
        X = np.random.default_rng(0).normal(size=(12, 2))
        predictions = kfold_predict(SPEC, X, np.ones(12), 4, 0)
        self.assertEqual(predictions.tolist(), [1.0] * 12)
        self.assertEqual(classification_metrics(np.ones(12), predictions).accuracy, 1.0)

    def test_leave_one_out(self):
        X = np.arange(6, dtype=float).reshape(6, 1)
        predictions = kfold_predict(SPEC, X, X[:, 0] * 2, 6, 0, TaskType.REGRESSION)
        self.assertEqual(predictions.shape, (6,))

    def test_deterministic_and_independent_of_threads(self):
        t = random_table(np.random.default_rng(3), n_rows=25)
        X, y = t.drop(["y"]), t.column("y")
        first = kfold_predict(SPEC, X, y, 5, 7)
        threaded = kfold_predict(LearnerSpec(n_trees=5, seed=1, n_jobs=3), X, y, 5, 7)
        np.testing.assert_array_equal(first, threaded)
        np.testing.assert_array_equal(first, kfold_predict(SPEC, X, y, 5, 7))

    def test_too_few_rows(self):
        with self.assertRaises(ValidationError):
            kfold_predict(SPEC, np.zeros((3, 1)), np.zeros(3), 5, 0)


class TestMetrics(unittest.TestCase):

    def test_classification_example(self):
        m = classification_metrics([1, 1, 0, 0], [1, 0, 0, 0])
        self.assertEqual((m.precision, m.recall, m.accuracy), (1.0, 0.5, 0.75))
        self.assertAlmostEqual(m.f1, 2 / 3)
        self.assertEqual(m.headline, m.f1)

    def test_perfect_predictions(self):
        m = classification_metrics([1, 0, 1], [1, 0, 1])
        self.assertEqual(list(m.scores().values()), [1.0, 1.0, 1.0, 1.0])

    def test_all_zero_predictions_warn(self):
        m = classification_metrics([1, 0, 1], [0, 0, 0], quiet=True)
        self.assertEqual((m.precision, m.recall, m.f1), (0.0, 0.0, 0.0))
        self.assertEqual(len(m.warnings), 1)
        self.assertIn("precision", m.warnings[0])

    def test_non_binary_values(self):
        with self.assertRaises(ValidationError):
            classification_metrics([1, 2], [1, 0])
        with self.assertRaises(ValidationError):
            classification_metrics([1, 0], [1])

    def test_rmse_examples(self):
        self.assertAlmostEqual(regression_metrics([0, 0], [3, 4]).rmse, 3.5355, places=4)
        self.assertAlmostEqual(regression_metrics([1, 2, 3], [2, 2, 2]).rmse, 0.8165, places=4)
        self.assertEqual(regression_metrics([1, 2], [1, 2]).rmse, 0.0)
        with self.assertRaises(ValidationError):
            regression_metrics([], [])

    def test_evaluate_table_records_folds(self):
        t = random_table(np.random.default_rng(8), n_rows=20)
        m = evaluate_table(t, "y", SPEC, 4, 0, TaskType.CLASSIFICATION)
        self.assertEqual(m.fold_count, 4)
        self.assertEqual(len(m.per_fold), 4)
        self.assertEqual(list(m.per_fold[0]), ["precision", "recall", "f1", "accuracy"])
        with self.assertRaises(EvalError):
            evaluate_table(t.select(["y"]), "y", SPEC, 4, 0, TaskType.CLASSIFICATION)


class TestCompare(unittest.TestCase):

    def setUp(self):
        self.table = random_table(np.random.default_rng(12), n_rows=30)

    def test_identical_tables_give_identical_bundles(self):
        report = compare(self.table, self.table, "y", SPEC, k=3, seed=4)
        self.assertEqual(report.baseline, report.augmented)
        self.assertFalse(report.improved)

    def test_report_contents(self):
        cfg = small_augment_config()
        history = []
        augmented = iterate_rounds(self.table, cfg, history=history)
        report = compare(self.table, augmented, "y", SPEC, k=3, seed=4, config={"eval_k": 3},
                         stage_counts={"loaded": {"rows": 30, "columns": 4}}, rounds=history,
                         warnings=["earlier"])
        report.config_hash = "abc"
        d = json.loads(report.to_json())
        self.assertEqual(list(d), ["schema", "schema_version", "task", "target", "config_hash", "baseline",
                                   "augmented", "improved", "shapes", "stage_counts", "rounds", "fitness",
                                   "warnings", "extras", "config"])
        self.assertEqual(d["schema"], REPORT_SCHEMA)
        self.assertEqual(d["shapes"]["augmented"], {"rows": 30, "columns": 10})
        self.assertEqual(len(d["fitness"]), 6)
        self.assertEqual(d["warnings"][0], "earlier")
        self.assertTrue(any("rows/columns" in w for w in d["warnings"]))
        self.assertEqual(d["rounds"][0]["new_columns"], 6)

        text = report.to_text()
        self.assertIn("baseline", text)
        self.assertIn("Augmentation rounds:", text)
        self.assertIn("Warnings:", text)

    def test_compare_is_deterministic(self):
        augmented = iterate_rounds(self.table, small_augment_config())
        first = compare(self.table, augmented, "y", SPEC, k=3, seed=4).to_json()
        second = compare(self.table, augmented, "y", SPEC, k=3, seed=4).to_json()
        self.assertEqual(first, second)

    def test_mismatched_tables(self):
        with self.assertRaises(ValidationError):
            compare(self.table, self.table.drop(["y"]), "y", SPEC, k=3)
        with self.assertRaises(ValidationError):
            compare(self.table, self.table.take(range(20)), "y", SPEC, k=3)
        flipped = self.table.with_column("y", 1.0 - self.table.column("y"))
        with self.assertRaises(ValidationError):
            compare(self.table, flipped, "y", SPEC, k=3)

    def test_regression_report(self):
        t = random_table(np.random.default_rng(2), n_rows=24, binary=False)
        report = compare(t, t, "y", SPEC, k=4, task=TaskType.REGRESSION)
        d = report.to_dict()
        self.assertEqual(list(d["baseline"]), ["task", "rmse", "fold_count", "per_fold"])
        self.assertGreaterEqual(d["baseline"]["rmse"], 0.0)

    def test_improved_direction(self):
        low = MetricsBundle(TaskType.REGRESSION, rmse=0.1)
        high = MetricsBundle(TaskType.REGRESSION, rmse=0.2)
        self.assertTrue(ComparisonReport(TaskType.REGRESSION, "y", high, low).improved)
        better = MetricsBundle(TaskType.CLASSIFICATION, f1=0.8)
        worse = MetricsBundle(TaskType.CLASSIFICATION, f1=0.7)
        self.assertTrue(ComparisonReport(TaskType.CLASSIFICATION, "y", worse, better).improved)


if __name__ == "__main__":
    unittest.main()
