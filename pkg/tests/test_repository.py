"""
Unit tests for the DuckDB artifact catalog
"""
import os
import tempfile
import unittest
from datetime import datetime, timedelta

import numpy as np

from residual_augment_py.augment import augment_dataset, residual_features
from residual_augment_py.config import StoreConfig, StoreLocation, TaskType
from residual_augment_py.evaluation import ComparisonReport, MetricsBundle
from residual_augment_py.exceptions import ConfigError, StoreError
from residual_augment_py.repository import (ArtifactStore, BankCacheRepository, BaseRepository,
                                           ReportRepository)
from tests.helpers import random_table, small_augment_config


class NoteRepository(BaseRepository):
    table_name = "notes"
    id_field = "note_id"
    columns = {"note_id": "INTEGER", "body": "VARCHAR", "tags": "JSON"}


class TestArtifactStore(unittest.TestCase):

    def setUp(self):
        self.store = ArtifactStore.get_instance(name="test_store")

    def tearDown(self):
        ArtifactStore.release("test_store")

    def test_instances_are_shared_by_name(self):
        self.assertIs(ArtifactStore.get_instance(name="test_store"), self.store)
        self.assertIs(ArtifactStore.get_instance(StoreConfig(name="test_store")), self.store)

    def test_query_wrappers(self):
        self.store.execute("CREATE TABLE t (a INTEGER)")
        self.store.execute("INSERT INTO t VALUES (?), (?)", [1, 2])
        self.assertEqual(self.store.execute_and_fetch("SELECT SUM(a) FROM t"), [(3,)])
        self.assertEqual(self.store.query("SELECT a FROM t WHERE a > ?", [1])["a"].tolist(), [2])

    def test_errors_become_store_errors(self):
        with self.assertRaises(StoreError) as ctx:
            self.store.execute("SELEC 1")
        self.assertEqual(ctx.exception.exit_code, 7)
        with self.assertRaises(StoreError):
            self.store.execute_and_fetch("SELECT * FROM missing_table")

    def test_transaction_rolls_back_on_error(self):
        self.store.execute("CREATE TABLE t (a INTEGER)")
        with self.assertRaises(RuntimeError):
            with self.store:
                self.store.execute("INSERT INTO t VALUES (1)")
                raise RuntimeError("boom")
        self.assertEqual(self.store.execute_and_fetch("SELECT COUNT(*) FROM t"), [(0,)])
        with self.store:
            self.store.execute("INSERT INTO t VALUES (1)")
        self.assertEqual(self.store.execute_and_fetch("SELECT COUNT(*) FROM t"), [(1,)])

    def test_file_location_requires_a_filename(self):
        with self.assertRaises(ConfigError):
            ArtifactStore.get_instance(name="no_file", location=StoreLocation.FILE)

    def test_cache_dir_under_a_file_is_a_store_error(self):
        with tempfile.TemporaryDirectory() as tmp:
            blocker = os.path.join(tmp, "blocker")
            with open(blocker, "w", encoding="utf-8") as f:
                f.write("x\n")
            with self.assertRaises(StoreError):
                ArtifactStore.for_cache_dir(os.path.join(blocker, "cache"))


class TestBaseRepository(unittest.TestCase):

    def setUp(self):
        self.store = ArtifactStore.get_instance(name="test_base_repository")
        self.repo = NoteRepository(self.store).init(drop_if_exists=True)

    def tearDown(self):
        ArtifactStore.release("test_base_repository")

    def test_crud(self):
        self.repo.insert({"note_id": 1, "body": "first", "tags": ["a", "b"]})
        self.repo.insert({"note_id": 2, "body": "second", "tags": {"k": 1}})
        self.assertEqual(self.repo.count(), 2)
        self.assertTrue(self.repo.exists_by_id(1))
        self.assertEqual(self.repo.find_by_id(1), {"note_id": 1, "body": "first", "tags": ["a", "b"]})
        self.assertEqual(self.repo.find_by_id(2)["tags"], {"k": 1})
        self.repo.delete_by_id(1)
        self.assertFalse(self.repo.exists_by_id(1))
        self.assertIsNone(self.repo.find_by_id(1))
        self.assertEqual(self.repo.to_dataframe(order_by="note_id")["body"].tolist(), ["second"])

    def test_duplicate_id_is_a_store_error(self):
        self.repo.insert({"note_id": 1, "body": "x"})
        with self.assertRaises(StoreError):
            self.repo.insert({"note_id": 1, "body": "y"})

    def test_incomplete_definition(self):
        class Broken(BaseRepository):
            table_name = "broken"

        with self.assertRaises(StoreError):
            Broken(self.store)


class TestBankCache(unittest.TestCase):

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.cache_dir = os.path.join(self._tmp.name, "cache")
        self.cache = BankCacheRepository(self.cache_dir).init()
        self.table = random_table(np.random.default_rng(6), n_rows=24)
        self.cfg = small_augment_config()

    def tearDown(self):
        ArtifactStore.release(os.path.join(os.path.abspath(self.cache_dir), "catalog.duckdb"))
        self._tmp.cleanup()

    def test_save_then_find(self):
        _, banks = augment_dataset(self.table, self.cfg)
        self.assertIsNone(self.cache.find("k1"))
        self.cache.save("k1", banks)
        self.assertTrue(self.cache.exists("k1"))
        self.assertTrue(os.path.isfile(self.cache.path_for("k1")))

        found = self.cache.find("k1")
        self.assertEqual((self.cache.hits, self.cache.misses), (1, 1))
        self.assertEqual(residual_features(self.table, found, self.cfg),
                         residual_features(self.table, banks, self.cfg))
        row = self.cache.find_by_id("k1")
        self.assertEqual((row["n_banks"], row["n_models"]), (2, 6))
        self.assertEqual(row["meta"]["suffixes"], ["0", "1"])
        fitness = self.cache.fitness.find_for("k1")
        self.assertEqual(len(fitness), 6)
        self.assertEqual(set(fitness["bank"]), {"0", "1"})

    def test_saving_again_replaces_the_entry(self):
        _, banks = augment_dataset(self.table, self.cfg)
        self.cache.save("k1", banks)
        self.cache.save("k1", banks[:1])
        self.assertEqual(self.cache.count(), 1)
        self.assertEqual(len(self.cache.fitness.find_for("k1")), 3)

    def test_unreadable_file_is_discarded(self):
        _, banks = augment_dataset(self.table, self.cfg)
        self.cache.save("k1", banks)
        with open(self.cache.path_for("k1"), "wb") as f:
            f.write(b"garbage")
        self.assertIsNone(self.cache.find("k1"))
        self.assertEqual(self.cache.count(), 0)
        self.assertFalse(os.path.exists(self.cache.path_for("k1")))

    def test_augment_dataset_uses_the_cache(self):
        first, _ = augment_dataset(self.table, self.cfg, bank_cache=self.cache)
        second, _ = augment_dataset(self.table, self.cfg, bank_cache=self.cache)
        self.assertEqual(first, second)
        self.assertEqual((self.cache.hits, self.cache.misses), (1, 1))


class TestReportRepository(unittest.TestCase):

    def setUp(self):
        self.store = ArtifactStore.get_instance(name="test_reports")
        self.repo = ReportRepository(self.store).init(drop_if_exists=True)

    def tearDown(self):
        ArtifactStore.release("test_reports")

    def _report(self, baseline: float, augmented: float) -> ComparisonReport:
        return ComparisonReport(TaskType.CLASSIFICATION, "y_yes",
                                MetricsBundle(TaskType.CLASSIFICATION, f1=baseline),
                                MetricsBundle(TaskType.CLASSIFICATION, f1=augmented),
                                shapes={"augmented": {"rows": 10, "columns": 7}})

    def test_history_is_chronological(self):
        start = datetime(2024, 1, 1, 12, 0, 0)
        second = self.repo.save(self._report(0.5, 0.4), "h2", "hygienic", "/r2", start + timedelta(seconds=5))
        first = self.repo.save(self._report(0.5, 0.6), "h1", "faithful", "/r1", start)
        history = self.repo.history()
        self.assertEqual(history["run_id"].tolist(), [first, second])
        self.assertEqual(history["improved"].tolist(), [True, False])
        self.assertEqual(history["n_columns"].tolist(), [7, 7])
        self.assertEqual(self.repo.history(limit=1)["config_hash"].tolist(), ["h2"])
        self.assertTrue(first.startswith("h1-20240101T120000"))


if __name__ == "__main__":
    unittest.main()
