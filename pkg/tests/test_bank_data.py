"""
Acceptance runs on the UCI bank marketing file

Skipped unless RESAUG_BANK_DATA points at bank-additional.csv or bank-additional.zip.
These train hundreds of forests and take minutes.
"""
import os
import tempfile
import unittest

from residual_augment_py.cli import run_extras, run_pipeline
from residual_augment_py.config import RegressionTarget, RunConfig
from residual_augment_py.ingest import fetch_dataset, load_csv, sample_rows
from residual_augment_py.repository import ArtifactStore, BankCacheRepository
from residual_augment_py.utils import ConfigLoader

BANK_DATA = os.environ.get("RESAUG_BANK_DATA")
CONFIG_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "configs")


def _bank_config(name: str, cache_dir: str, **overrides) -> RunConfig:
    values = ConfigLoader.from_file(os.path.join(CONFIG_DIR, name))
    values.update(source=BANK_DATA, cache_dir=cache_dir, out_dir=os.path.join(cache_dir, "out"),
                  threads=os.cpu_count() or 1)
    values.update(overrides)
    return RunConfig.from_dict(values)


@unittest.skipUnless(BANK_DATA, "RESAUG_BANK_DATA is not set")
class TestBankData(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls._tmp = tempfile.TemporaryDirectory()
        cls.cache_dir = cls._tmp.name
        cls.bank_cache = BankCacheRepository(cls.cache_dir).init()
        cls.cfg = _bank_config("bank-classification.cfg", cls.cache_dir)
        cls.report, cls.augmented = run_pipeline(cls.cfg, cls.bank_cache)

    @classmethod
    def tearDownClass(cls):
        ArtifactStore.release(os.path.join(os.path.abspath(cls.cache_dir), "catalog.duckdb"))
        cls._tmp.cleanup()

    def test_file_shape_and_sample_size(self):
        path = fetch_dataset(BANK_DATA, os.path.join(self.cache_dir, "data"), member=self.cfg.zip_member)
        raw = load_csv(path, ";")
        self.assertEqual((raw.n_rows, raw.n_cols), (4119, 21))
        self.assertEqual(sample_rows(raw, 0.6, 42).n_rows, 2471)

    def test_augmented_f1_near_expected_value(self):
        self.assertAlmostEqual(self.report.augmented.f1, 0.82376, delta=0.05)

    def test_augmentation_does_not_hurt_f1(self):
        self.assertGreaterEqual(self.report.augmented.f1, self.report.baseline.f1)

    def test_structural_counts(self):
        summary = self.report.rounds[0]
        attributes = summary["attributes"]
        self.assertEqual(summary["banks"], 2)
        self.assertEqual(summary["models"], 2 * attributes)
        self.assertEqual(summary["new_columns"], 2 * attributes)
        self.assertEqual(self.report.shapes["augmented"]["columns"], 3 * attributes + 1)
        self.assertEqual(self.report.shapes["original"]["columns"], attributes + 1)

    def test_seed_sweep_is_recorded(self):
        extras = run_extras(self.cfg, self.report, self.bank_cache)
        self.assertEqual([entry["seed"] for entry in extras["seed_sweep"]], [1, 2, 3, 4])

    def test_in_sample_residuals_usually_look_at_least_as_good(self):
        """Leakage sentinel: a documented expectation, not a correctness requirement"""
        at_least_as_good = 0
        for seed in (42, 1, 2, 3, 4):
            cfg = self.cfg.with_seed(seed)
            cfg.record_hygienic = True
            extras = run_extras(cfg, run_pipeline(cfg, self.bank_cache)[0], self.bank_cache)
            at_least_as_good += extras["hygienic"]["in_sample_at_least_as_good"]
        self.assertGreaterEqual(at_least_as_good, 4)

    def _run_with_fresh_cache(self, name: str, **overrides):
        """Pipeline run that trains its own banks instead of reading the shared cache"""
        cache_dir = tempfile.mkdtemp(dir=self.cache_dir)
        try:
            cfg = _bank_config(name, self.cache_dir, **overrides)
            return run_pipeline(cfg, BankCacheRepository(cache_dir).init())
        finally:
            ArtifactStore.release(os.path.join(os.path.abspath(cache_dir), "catalog.duckdb"))

    def test_reports_do_not_depend_on_thread_count(self):
        report, augmented = self._run_with_fresh_cache("bank-classification.cfg", threads=1)
        self.assertEqual(report.to_json(), self.report.to_json())
        self.assertEqual(augmented.to_csv(), self.augmented.to_csv())

    def test_regression_reports_do_not_depend_on_thread_count(self):
        many = self._run_with_fresh_cache("bank-regression.cfg")
        single = self._run_with_fresh_cache("bank-regression.cfg", threads=1)
        self.assertEqual(single[0].to_json(), many[0].to_json())
        self.assertEqual(single[1].to_csv(), many[1].to_csv())

    def test_regression_modes(self):
        binarized, _ = run_pipeline(_bank_config("bank-regression.cfg", self.cache_dir), self.bank_cache)
        self.assertLess(binarized.baseline.rmse, 0.05)
        self.assertLess(binarized.augmented.rmse, 0.05)

        continuous_cfg = _bank_config("bank-regression.cfg", self.cache_dir,
                                      regression_target=RegressionTarget.CONTINUOUS.value)
        continuous, _ = run_pipeline(continuous_cfg, self.bank_cache)
        for rmse in (continuous.baseline.rmse, continuous.augmented.rmse):
            self.assertTrue(0.0 < rmse < 1.0)
        self.assertLess(abs(continuous.augmented.rmse - continuous.baseline.rmse), 0.2)


if __name__ == "__main__":
    unittest.main()
