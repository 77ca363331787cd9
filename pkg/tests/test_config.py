"""
Unit tests for configuration classes: validation, presets, echo and hashing
"""
import unittest

from residual_augment_py.config import (AugmentConfig, AugmentMode, EvalConfig, LearnerSpec, RegressionTarget,
                                        ResidualSource, RunConfig, StoreConfig, StoreLocation, TaskType,
                                        Weighting)
from residual_augment_py.exceptions import ConfigError


def _values(**overrides):
    values = {"source": "data.csv", "target": "y_yes"}
    values.update(overrides)
    return values


class TestEnums(unittest.TestCase):

    def test_parse_accepts_value_and_underscore_spelling(self):
        self.assertIs(AugmentMode.parse("single_bank"), AugmentMode.SINGLE_BANK)
        self.assertIs(ResidualSource.parse("Out-Of-Fold"), ResidualSource.OUT_OF_FOLD)
        self.assertIs(TaskType.parse(TaskType.REGRESSION), TaskType.REGRESSION)

    def test_parse_rejects_unknown_value(self):
        with self.assertRaises(ConfigError) as ctx:
            Weighting.parse("cubic")
        self.assertIn("faithful", str(ctx.exception))


class TestLearnerSpec(unittest.TestCase):

    def test_default_max_features_depends_on_task(self):
        spec = LearnerSpec()
        self.assertEqual(spec.resolve_max_features(TaskType.CLASSIFICATION, 63), 8)
        self.assertEqual(spec.resolve_max_features(TaskType.REGRESSION, 63), 63)

    def test_explicit_policies(self):
        self.assertEqual(LearnerSpec(max_features="sqrt").resolve_max_features(TaskType.REGRESSION, 10), 4)
        self.assertEqual(LearnerSpec(max_features="all").resolve_max_features(TaskType.CLASSIFICATION, 10), 10)
        self.assertEqual(LearnerSpec(max_features=20).resolve_max_features(TaskType.REGRESSION, 10), 10)

    def test_invalid_values(self):
        with self.assertRaises(ConfigError):
            LearnerSpec(n_trees=0)
        with self.assertRaises(ConfigError):
            LearnerSpec(max_features="log2")
        with self.assertRaises(ConfigError):
            LearnerSpec(max_features=0)

    def test_with_seed_keeps_other_fields(self):
        spec = LearnerSpec(n_trees=7, max_features="sqrt", bootstrap=False).with_seed(9)
        self.assertEqual((spec.n_trees, spec.max_features, spec.bootstrap, spec.seed), (7, "sqrt", False, 9))

    def test_tree_shape_limits(self):
        with self.assertRaises(ConfigError):
            LearnerSpec(max_depth=0)
        with self.assertRaises(ConfigError):
            LearnerSpec(min_samples_split=1)
        spec = LearnerSpec(max_depth=3, min_samples_split=5).with_seed(1)
        self.assertEqual((spec.max_depth, spec.min_samples_split), (3, 5))

    def test_dict_round_trip_keeps_threads_out_of_results(self):
        spec = LearnerSpec(n_trees=3, max_features=2, max_depth=4, min_samples_split=3, n_jobs=6)
        d = spec.to_dict()
        self.assertEqual(d["n_jobs"], 6)
        self.assertEqual(LearnerSpec.from_dict(d).to_dict(), d)
        self.assertNotIn("n_jobs", spec.result_dict())
        self.assertEqual(LearnerSpec().to_dict()["max_depth"], "none")
        self.assertIsNone(LearnerSpec.from_dict(LearnerSpec().to_dict()).max_depth)


class TestAugmentAndEvalConfig(unittest.TestCase):

    def test_rounds_must_be_positive(self):
        with self.assertRaises(ConfigError):
            AugmentConfig(target="y", rounds=0)

    def test_invalid_fractions_and_folds(self):
        with self.assertRaises(ConfigError):
            AugmentConfig(target="y", test_fraction=1.0)
        with self.assertRaises(ConfigError):
            AugmentConfig(target="y", oof_folds=1)
        with self.assertRaises(ConfigError):
            EvalConfig(k=1)

    def test_to_dict_names_modes_by_value(self):
        d = AugmentConfig(target="y", mode=AugmentMode.SINGLE_BANK, round_decimals=None).to_dict()
        self.assertEqual(d["augment_mode"], "single-bank")
        self.assertEqual(d["round_decimals"], "none")

    def test_result_dict_drops_thread_counts(self):
        cfg = AugmentConfig(target="y", learner=LearnerSpec(n_jobs=4), n_jobs=4)
        self.assertEqual(cfg.to_dict()["n_jobs"], 4)
        self.assertNotIn("n_jobs", cfg.result_dict())
        self.assertEqual(cfg.result_dict(), AugmentConfig(target="y").result_dict())


class TestRunConfig(unittest.TestCase):

    def test_defaults_follow_faithful_preset(self):
        cfg = RunConfig.from_dict(_values())
        self.assertEqual(cfg.mode, "faithful")
        self.assertIs(cfg.augment.weighting, Weighting.FAITHFUL)
        self.assertIs(cfg.augment.residual_source, ResidualSource.IN_SAMPLE)
        self.assertEqual(cfg.augment.round_decimals, 4)
        self.assertIs(cfg.augment.mode, AugmentMode.PER_CLASS)
        self.assertEqual(cfg.evaluation.k, 5)
        self.assertEqual(cfg.augment.learner.n_trees, 100)

    def test_hygienic_preset(self):
        cfg = RunConfig.from_dict(_values(mode="hygienic"))
        self.assertIs(cfg.augment.weighting, Weighting.CLAMPED)
        self.assertIs(cfg.augment.residual_source, ResidualSource.OUT_OF_FOLD)
        self.assertIsNone(cfg.augment.round_decimals)

    def test_overriding_a_preset_key_makes_mode_custom(self):
        cfg = RunConfig.from_dict(_values(mode="faithful", weighting="clamped"))
        self.assertIsNone(cfg.mode)
        self.assertEqual(cfg.to_dict()["mode"], "custom")

    def test_regression_defaults_to_single_bank(self):
        cfg = RunConfig.from_dict(_values(task="regression", target="age"))
        self.assertIs(cfg.augment.mode, AugmentMode.SINGLE_BANK)
        self.assertIs(cfg.regression_target, RegressionTarget.BINARIZED)
        self.assertTrue(cfg.binarize)

    def test_per_class_with_continuous_target_is_rejected(self):
        with self.assertRaises(ConfigError):
            RunConfig.from_dict(_values(task="regression", target="age", regression_target="continuous",
                                        augment_mode="per-class"))

    def test_unknown_and_missing_keys(self):
        with self.assertRaises(ConfigError) as ctx:
            RunConfig.from_dict(_values(n_estimators=10))
        self.assertIn("n_estimators", str(ctx.exception))
        with self.assertRaises(ConfigError):
            RunConfig.from_dict({"target": "y"})
        with self.assertRaises(ConfigError):
            RunConfig.from_dict({"source": "x.csv"})

    def test_rounds_zero_is_a_config_error(self):
        with self.assertRaises(ConfigError):
            RunConfig.from_dict(_values(rounds="0"))

    def test_bad_scalar_values(self):
        for key, value in (("sample_fraction", "0"), ("sample_fraction", "abc"), ("eval_k", "2.5"),
                           ("aux_bootstrap", "maybe"), ("separator", ";;"), ("threads", "0")):
            with self.subTest(key=key, value=value):
                with self.assertRaises(ConfigError):
                    RunConfig.from_dict(_values(**{key: value}))

    def test_target_in_drop_columns_is_rejected(self):
        with self.assertRaises(ConfigError):
            RunConfig.from_dict(_values(drop_columns="y_no,y_yes"))

    def test_echo_rebuilds_identical_config(self):
        cfg = RunConfig.from_dict(_values(drop_columns="y_no", separator="\\t", seed_sweep="1, 2,3",
                                          missing_values="NA,?", rounds=2, aux_max_features="sqrt"))
        self.assertEqual(cfg.separator, "\t")
        self.assertEqual(cfg.seed_sweep, [1, 2, 3])
        echo = cfg.to_dict()
        self.assertEqual(RunConfig.from_dict(echo).to_dict(), echo)

    def test_tree_shape_keys_reach_both_learners(self):
        cfg = RunConfig.from_dict(_values(aux_max_depth=3, eval_min_samples_split="4"))
        self.assertEqual(cfg.augment.learner.max_depth, 3)
        self.assertIsNone(cfg.evaluation.learner.max_depth)
        self.assertEqual(cfg.evaluation.learner.min_samples_split, 4)
        echo = cfg.to_dict()
        self.assertEqual((echo["aux_max_depth"], echo["eval_max_depth"]), (3, "none"))
        self.assertEqual(RunConfig.from_dict(echo).to_dict(), echo)
        self.assertNotEqual(cfg.config_hash(), RunConfig.from_dict(_values()).config_hash())
        with self.assertRaises(ConfigError):
            RunConfig.from_dict(_values(aux_min_samples_split=1))

    def test_hash_ignores_output_locations_and_threads(self):
        a = RunConfig.from_dict(_values(out_dir="a", cache_dir="c1", threads=1))
        b = RunConfig.from_dict(_values(out_dir="b", cache_dir="c2", threads=8, emit_augmented="true"))
        self.assertEqual(a.config_hash(), b.config_hash())
        self.assertEqual(len(a.config_hash()), 16)
        c = RunConfig.from_dict(_values(sample_seed=7))
        self.assertNotEqual(a.config_hash(), c.config_hash())

    def test_with_seed_replaces_every_seed(self):
        cfg = RunConfig.from_dict(_values(seed_sweep="1,2", record_hygienic="true")).with_seed(5)
        self.assertEqual(cfg.sample_seed, 5)
        self.assertEqual(cfg.augment.split_seed, 5)
        self.assertEqual(cfg.augment.learner.seed, 5)
        self.assertEqual(cfg.evaluation.seed, 5)
        self.assertEqual(cfg.seed_sweep, [])
        self.assertFalse(cfg.record_hygienic)

    def test_with_mode_resets_preset_keys(self):
        cfg = RunConfig.from_dict(_values(weighting="clamped")).with_mode("faithful")
        self.assertEqual(cfg.mode, "faithful")
        self.assertIs(cfg.augment.weighting, Weighting.FAITHFUL)

    def test_threads_drive_both_pools(self):
        cfg = RunConfig.from_dict(_values(threads=3))
        self.assertEqual(cfg.augment.n_jobs, 3)
        self.assertEqual(cfg.evaluation.learner.n_jobs, 3)


class TestStoreConfig(unittest.TestCase):

    def test_file_location_requires_filename(self):
        with self.assertRaises(ConfigError):
            StoreConfig(name="x", location=StoreLocation.FILE)

    def test_memory_default(self):
        config = StoreConfig()
        self.assertIs(config.location, StoreLocation.MEMORY)
        self.assertEqual(config.settings, {})


if __name__ == "__main__":
    unittest.main()
