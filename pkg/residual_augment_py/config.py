"""
Configuration module for preprocessing, augmentation, evaluation and the artifact store
"""
import math
from enum import Enum
from typing import Optional, Dict, Any, List, Union

from typing_extensions import Literal

from .exceptions import ConfigError


class _ConfigEnum(Enum):
    """Enum whose members are spelled in config files by their value"""

    @classmethod
    def parse(cls, value: Union[str, "_ConfigEnum"]) -> "_ConfigEnum":
        if isinstance(value, cls):
            return value
        text = str(value).strip().lower().replace("_", "-")
        for member in cls:
            if member.value == text:
                return member
        allowed = ", ".join(m.value for m in cls)
        raise ConfigError(f"Invalid {cls.__name__} '{value}' (expected one of: {allowed})")


class TaskType(_ConfigEnum):
    """Prediction task of the final model"""
    CLASSIFICATION = "classification"
    REGRESSION = "regression"


class AugmentMode(_ConfigEnum):
    """How attribute model banks are formed"""
    PER_CLASS = "per-class"
    SINGLE_BANK = "single-bank"


class Weighting(_ConfigEnum):
    """How the bank fitness weighs a residual"""
    FAITHFUL = "faithful"
    CLAMPED = "clamped"


class ResidualSource(_ConfigEnum):
    """Which model predicts the rows a bank was trained on"""
    IN_SAMPLE = "in-sample"
    OUT_OF_FOLD = "out-of-fold"


class RegressionTarget(_ConfigEnum):
    """Treatment of the target column in regression runs"""
    BINARIZED = "binarized"
    CONTINUOUS = "continuous"


class StoreLocation(_ConfigEnum):
    """Location types for the DuckDB artifact catalog"""
    MEMORY = "memory"
    FILE = "file"


MODE_PRESETS = {
    "faithful": {
        "weighting": Weighting.FAITHFUL,
        "residual_source": ResidualSource.IN_SAMPLE,
        "round_decimals": 4,
    },
    "hygienic": {
        "weighting": Weighting.CLAMPED,
        "residual_source": ResidualSource.OUT_OF_FOLD,
        "round_decimals": None,
    },
}


def _as_bool(value: Any, key: str) -> bool:
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in ("true", "yes", "on", "1"):
        return True
    if text in ("false", "no", "off", "0"):
        return False
    raise ConfigError(f"'{key}' must be a boolean, got '{value}'")


def _as_int(value: Any, key: str) -> int:
    if isinstance(value, bool):
        raise ConfigError(f"'{key}' must be an integer, got '{value}'")
    try:
        number = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"'{key}' must be an integer, got '{value}'")
    if not number.is_integer():
        raise ConfigError(f"'{key}' must be an integer, got '{value}'")
    return int(number)


def _as_float(value: Any, key: str) -> float:
    try:
        number = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"'{key}' must be a number, got '{value}'")
    if not math.isfinite(number):
        raise ConfigError(f"'{key}' must be finite, got '{value}'")
    return number


def _as_optional_int(value: Any, key: str) -> Optional[int]:
    if value is None or str(value).strip().lower() in ("", "none", "null"):
        return None
    return _as_int(value, key)


def _as_list(value: Any) -> List[str]:
    if value is None:
        return []
    if isinstance(value, (list, tuple)):
        return [str(v).strip() for v in value if str(v).strip()]
    return [part.strip() for part in str(value).split(",") if part.strip()]


def _as_text(value: Any) -> str:
    text = "" if value is None else str(value)
    return text.replace("\\t", "\t")


# None picks the task default: sqrt for classification, all for regression
MaxFeatures = Union[None, Literal["all", "sqrt"], int]


class LearnerSpec:
    """Random forest hyperparameters"""

    def __init__(self,
                 n_trees: int = 100,
                 max_features: MaxFeatures = None,
                 bootstrap: bool = True,
                 seed: int = 42,
                 max_depth: Optional[int] = None,
                 min_samples_split: int = 2,
                 n_jobs: int = 1):
        """
        Initialize a forest specification

        Args:
            n_trees: Number of trees in the forest
            max_features: Features examined per split: None (task default), 'all', 'sqrt' or a count
            bootstrap: Whether every tree is fit on a bootstrap resample
            seed: Base seed; each tree derives its own stream from (seed, tree index)
            max_depth: Depth at which nodes become leaves; None grows until pure
            min_samples_split: Nodes with fewer rows become leaves
            n_jobs: Threads used to train trees of one forest
        """
        self.n_trees = n_trees
        self.max_features = max_features
        self.bootstrap = bootstrap
        self.seed = seed
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.n_jobs = n_jobs

        if self.n_trees < 1:
            raise ConfigError("n_trees must be at least 1")
        if self.n_jobs < 1:
            raise ConfigError("n_jobs must be at least 1")
        if self.max_depth is not None and self.max_depth < 1:
            raise ConfigError("max_depth must be at least 1")
        if self.min_samples_split < 2:
            raise ConfigError("min_samples_split must be at least 2")
        if isinstance(self.max_features, str):
            if self.max_features not in ("all", "sqrt"):
                raise ConfigError(f"max_features must be 'all', 'sqrt' or a count, got '{self.max_features}'")
        elif self.max_features is not None and self.max_features < 1:
            raise ConfigError("max_features must be at least 1")

    def resolve_max_features(self, task: TaskType, n_features: int) -> int:
        """Number of candidate features per split for a table with n_features columns"""
        policy = self.max_features
        if policy is None:
            policy = "sqrt" if task is TaskType.CLASSIFICATION else "all"
        if policy == "all":
            return n_features
        if policy == "sqrt":
            return max(1, math.ceil(math.sqrt(n_features)))
        return min(int(policy), n_features)

    def with_seed(self, seed: int) -> "LearnerSpec":
        return LearnerSpec(n_trees=self.n_trees, max_features=self.max_features,
                           bootstrap=self.bootstrap, seed=seed, max_depth=self.max_depth,
                           min_samples_split=self.min_samples_split, n_jobs=self.n_jobs)

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary representation"""
        return {
            "n_trees": self.n_trees,
            "max_features": "default" if self.max_features is None else self.max_features,
            "bootstrap": self.bootstrap,
            "seed": self.seed,
            "max_depth": "none" if self.max_depth is None else self.max_depth,
            "min_samples_split": self.min_samples_split,
            "n_jobs": self.n_jobs,
        }

    def result_dict(self) -> Dict[str, Any]:
        """to_dict without the thread count, which never changes a fitted forest"""
        values = self.to_dict()
        values.pop("n_jobs")
        return values

    @classmethod
    def from_dict(cls, values: Dict[str, Any]) -> "LearnerSpec":
        """Inverse of to_dict; missing keys take their defaults"""
        return cls(
            n_trees=_as_int(values.get("n_trees", 100), "n_trees"),
            max_features=_parse_max_features(values.get("max_features"), "max_features"),
            bootstrap=_as_bool(values.get("bootstrap", True), "bootstrap"),
            seed=_as_int(values.get("seed", 42), "seed"),
            max_depth=_as_optional_int(values.get("max_depth"), "max_depth"),
            min_samples_split=_as_int(values.get("min_samples_split", 2), "min_samples_split"),
            n_jobs=_as_int(values.get("n_jobs", 1), "n_jobs"),
        )


def _parse_max_features(value: Any, key: str) -> MaxFeatures:
    if value is None:
        return None
    text = str(value).strip().lower()
    if text in ("", "default", "none"):
        return None
    if text in ("all", "sqrt"):
        return text
    return _as_int(text, key)


class AugmentConfig:
    """Configuration of attribute model banks and residual columns"""

    def __init__(self,
                 target: str,
                 mode: AugmentMode = AugmentMode.PER_CLASS,
                 rounds: int = 1,
                 learner: Optional[LearnerSpec] = None,
                 weighting: Weighting = Weighting.FAITHFUL,
                 residual_source: ResidualSource = ResidualSource.IN_SAMPLE,
                 round_decimals: Optional[int] = 4,
                 test_fraction: float = 0.2,
                 split_seed: int = 42,
                 oof_folds: int = 5,
                 ratio_warning: float = 10.0,
                 n_jobs: int = 1):
        """
        Initialize augmentation configuration

        Args:
            target: Target column name
            mode: PER_CLASS (one bank per target value) or SINGLE_BANK
            rounds: Number of augmentation rounds, at least 1
            learner: Forest specification of the attribute models
            weighting: FAITHFUL uses (r2)**2 as is, CLAMPED clamps r2 to [0, 1] first
            residual_source: IN_SAMPLE or OUT_OF_FOLD predictions for a bank's own rows
            round_decimals: Decimals the absolute residual is rounded to before weighting (None disables)
            test_fraction: Held-out share used to compute each attribute model's r2
            split_seed: Seed of the per-attribute train/test split
            oof_folds: Folds used for out-of-fold residuals
            ratio_warning: Rows/columns ratio below which a warning is recorded
            n_jobs: Threads used to train attribute models concurrently
        """
        self.target = target
        self.mode = mode
        self.rounds = rounds
        self.learner = learner or LearnerSpec()
        self.weighting = weighting
        self.residual_source = residual_source
        self.round_decimals = round_decimals
        self.test_fraction = test_fraction
        self.split_seed = split_seed
        self.oof_folds = oof_folds
        self.ratio_warning = ratio_warning
        self.n_jobs = n_jobs

        if not self.target:
            raise ConfigError("target must be provided")
        if self.rounds < 1:
            raise ConfigError(f"rounds must be at least 1, got {self.rounds}")
        if not 0.0 < self.test_fraction < 1.0:
            raise ConfigError("test_fraction must lie in (0, 1)")
        if self.oof_folds < 2:
            raise ConfigError("oof_folds must be at least 2")
        if self.round_decimals is not None and self.round_decimals < 0:
            raise ConfigError("round_decimals must be non-negative")
        if self.n_jobs < 1:
            raise ConfigError("n_jobs must be at least 1")

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary representation"""
        return {
            "target": self.target,
            "augment_mode": self.mode.value,
            "rounds": self.rounds,
            "weighting": self.weighting.value,
            "residual_source": self.residual_source.value,
            "round_decimals": "none" if self.round_decimals is None else self.round_decimals,
            "test_fraction": self.test_fraction,
            "split_seed": self.split_seed,
            "oof_folds": self.oof_folds,
            "ratio_warning": self.ratio_warning,
            "n_jobs": self.n_jobs,
            "learner": self.learner.to_dict(),
        }

    def result_dict(self) -> Dict[str, Any]:
        """Keys that determine the trained banks; thread counts are left out"""
        values = self.to_dict()
        values.pop("n_jobs")
        values["learner"] = self.learner.result_dict()
        return values


class EvalConfig:
    """Configuration of the cross-validated comparison"""

    def __init__(self,
                 k: int = 5,
                 learner: Optional[LearnerSpec] = None,
                 shuffle_folds: bool = False,
                 seed: int = 42):
        """
        Initialize evaluation configuration

        Args:
            k: Number of folds
            learner: Forest specification of the final model
            shuffle_folds: Shuffle rows (seeded) before assigning contiguous folds
            seed: Seed from which per-fold model seeds are derived
        """
        self.k = k
        self.learner = learner or LearnerSpec()
        self.shuffle_folds = shuffle_folds
        self.seed = seed

        if self.k < 2:
            raise ConfigError(f"k must be at least 2, got {self.k}")

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary representation"""
        return {
            "k": self.k,
            "shuffle_folds": self.shuffle_folds,
            "seed": self.seed,
            "learner": self.learner.to_dict(),
        }


# Keys that never influence results; excluded from the config hash.
_NON_RESULT_KEYS = ("out_dir", "cache_dir", "threads", "emit_augmented")


class RunConfig:
    """Complete, serializable description of one run"""

    def __init__(self,
                 source: str,
                 target: str,
                 task: TaskType = TaskType.CLASSIFICATION,
                 zip_member: str = "bank-additional/bank-additional.csv",
                 separator: str = ";",
                 missing_values: Optional[List[str]] = None,
                 sample_fraction: float = 1.0,
                 sample_seed: int = 42,
                 drop_columns: Optional[List[str]] = None,
                 regression_target: RegressionTarget = RegressionTarget.BINARIZED,
                 mode: Optional[str] = "faithful",
                 augment: Optional[AugmentConfig] = None,
                 evaluation: Optional[EvalConfig] = None,
                 out_dir: str = "out",
                 cache_dir: str = ".resaug-cache",
                 threads: int = 1,
                 emit_augmented: bool = False,
                 seed_sweep: Optional[List[int]] = None,
                 record_hygienic: bool = False):
        """
        Initialize a run configuration

        Args:
            source: Dataset URL, local zip archive or local CSV path
            target: Target column name after one-hot encoding
            task: Final model task
            zip_member: CSV member extracted from a zip archive
            separator: CSV field separator
            missing_values: Cell texts treated as missing (the empty string is always missing)
            sample_fraction: Share of rows sampled before preprocessing
            sample_seed: Seed of the row sample
            drop_columns: Columns removed after encoding
            regression_target: Binarize or keep the continuous target in regression runs
            mode: Preset name ('faithful' or 'hygienic') the augmentation keys were derived from
            augment: Augmentation configuration
            evaluation: Evaluation configuration
            out_dir: Directory receiving reports and exports
            cache_dir: Directory holding the downloaded dataset and cached banks
            threads: Worker threads
            emit_augmented: Write augmented.csv next to the report
            seed_sweep: Extra seeds for which the pipeline is rerun and recorded
            record_hygienic: Also run hygienic augmentation and record its metrics
        """
        self.source = source
        self.target = target
        self.task = task
        self.zip_member = zip_member
        self.separator = separator
        self.missing_values = list(missing_values or [])
        self.sample_fraction = sample_fraction
        self.sample_seed = sample_seed
        self.drop_columns = list(drop_columns or [])
        self.regression_target = regression_target
        self.mode = mode
        self.augment = augment or AugmentConfig(target=target)
        self.evaluation = evaluation or EvalConfig()
        self.out_dir = out_dir
        self.cache_dir = cache_dir
        self.threads = threads
        self.emit_augmented = emit_augmented
        self.seed_sweep = list(seed_sweep or [])
        self.record_hygienic = record_hygienic

        # Validate config
        if not self.source:
            raise ConfigError("source must be provided")
        if len(self.separator) != 1:
            raise ConfigError(f"separator must be a single character, got '{self.separator}'")
        if not 0.0 < self.sample_fraction <= 1.0:
            raise ConfigError("sample_fraction must lie in (0, 1]")
        if self.threads < 1:
            raise ConfigError("threads must be at least 1")
        if self.augment.target != self.target:
            raise ConfigError("augment target differs from run target")
        if self.target in self.drop_columns:
            raise ConfigError(f"target '{self.target}' is listed in drop_columns")
        if self.mode is not None and self.mode not in MODE_PRESETS:
            raise ConfigError(f"mode must be 'faithful' or 'hygienic', got '{self.mode}'")
        if self.task is TaskType.REGRESSION and self.augment.mode is AugmentMode.PER_CLASS \
                and self.regression_target is RegressionTarget.CONTINUOUS:
            raise ConfigError("per-class banks require a binary target; use single-bank for a continuous target")

    @property
    def binarize(self) -> bool:
        """Whether the target column is thresholded to 0/1 after scaling"""
        return self.task is TaskType.CLASSIFICATION or self.regression_target is RegressionTarget.BINARIZED

    def to_dict(self) -> Dict[str, Any]:
        """Flat key/value echo; RunConfig.from_dict(echo) rebuilds an identical config"""
        aug = self.augment
        ev = self.evaluation
        return {
            "source": self.source,
            "zip_member": self.zip_member,
            "separator": self.separator.replace("\t", "\\t"),
            "missing_values": ",".join(self.missing_values),
            "sample_fraction": self.sample_fraction,
            "sample_seed": self.sample_seed,
            "drop_columns": ",".join(self.drop_columns),
            "target": self.target,
            "task": self.task.value,
            "regression_target": self.regression_target.value,
            "mode": self.mode if self.mode is not None else "custom",
            "augment_mode": aug.mode.value,
            "rounds": aug.rounds,
            "weighting": aug.weighting.value,
            "residual_source": aug.residual_source.value,
            "round_decimals": "none" if aug.round_decimals is None else aug.round_decimals,
            "test_fraction": aug.test_fraction,
            "split_seed": aug.split_seed,
            "oof_folds": aug.oof_folds,
            "ratio_warning": aug.ratio_warning,
            "aux_n_trees": aug.learner.n_trees,
            "aux_max_features": aug.learner.to_dict()["max_features"],
            "aux_bootstrap": aug.learner.bootstrap,
            "aux_seed": aug.learner.seed,
            "aux_max_depth": aug.learner.to_dict()["max_depth"],
            "aux_min_samples_split": aug.learner.min_samples_split,
            "eval_k": ev.k,
            "eval_n_trees": ev.learner.n_trees,
            "eval_max_features": ev.learner.to_dict()["max_features"],
            "eval_bootstrap": ev.learner.bootstrap,
            "eval_max_depth": ev.learner.to_dict()["max_depth"],
            "eval_min_samples_split": ev.learner.min_samples_split,
            "eval_seed": ev.seed,
            "shuffle_folds": ev.shuffle_folds,
            "seed_sweep": ",".join(str(s) for s in self.seed_sweep),
            "record_hygienic": self.record_hygienic,
            "out_dir": self.out_dir,
            "cache_dir": self.cache_dir,
            "threads": self.threads,
            "emit_augmented": self.emit_augmented,
        }

    def result_dict(self) -> Dict[str, Any]:
        """Echo restricted to the keys that determine results"""
        echo = self.to_dict()
        for key in _NON_RESULT_KEYS:
            echo.pop(key, None)
        return echo

    def config_hash(self) -> str:
        """Identifier of cached banks and reports produced by this config"""
        from .utils import stable_hash
        return stable_hash(self.result_dict())

    def with_seed(self, seed: int) -> "RunConfig":
        """Copy with every seed (sampling, split, forests, folds) replaced by seed"""
        echo = self.to_dict()
        for key in ("sample_seed", "split_seed", "aux_seed", "eval_seed"):
            echo[key] = seed
        echo["seed_sweep"] = ""
        echo["record_hygienic"] = False
        return RunConfig.from_dict(echo)

    def with_mode(self, mode: str) -> "RunConfig":
        """Copy with the augmentation keys reset to a preset"""
        echo = self.to_dict()
        preset = MODE_PRESETS[mode]
        echo["mode"] = mode
        echo["weighting"] = preset["weighting"].value
        echo["residual_source"] = preset["residual_source"].value
        echo["round_decimals"] = "none" if preset["round_decimals"] is None else preset["round_decimals"]
        return RunConfig.from_dict(echo)

    @classmethod
    def from_dict(cls, values: Dict[str, Any]) -> "RunConfig":
        """Build a RunConfig from flat key/value pairs (strings or native values)"""
        unknown = set(values) - set(CONFIG_KEYS)
        if unknown:
            raise ConfigError(f"Unknown config keys: {', '.join(sorted(unknown))}")
        if not values.get("source"):
            raise ConfigError("'source' is required")
        if not values.get("target"):
            raise ConfigError("'target' is required")

        task = TaskType.parse(values.get("task", "classification"))
        target = str(values["target"]).strip()

        mode = str(values.get("mode", "faithful")).strip().lower()
        if mode == "custom":
            preset = MODE_PRESETS["faithful"]
            mode_name = None
        elif mode in MODE_PRESETS:
            preset = MODE_PRESETS[mode]
            mode_name = mode
        else:
            raise ConfigError(f"mode must be 'faithful' or 'hygienic', got '{mode}'")

        default_aug_mode = AugmentMode.PER_CLASS if task is TaskType.CLASSIFICATION else AugmentMode.SINGLE_BANK
        weighting = Weighting.parse(values["weighting"]) if "weighting" in values else preset["weighting"]
        source = ResidualSource.parse(values["residual_source"]) if "residual_source" in values \
            else preset["residual_source"]
        decimals = _as_optional_int(values["round_decimals"], "round_decimals") if "round_decimals" in values \
            else preset["round_decimals"]
        if mode_name is not None and (weighting is not preset["weighting"]
                                      or source is not preset["residual_source"]
                                      or decimals != preset["round_decimals"]):
            mode_name = None

        threads = _as_int(values.get("threads", 1), "threads")
        aux_learner = LearnerSpec(
            n_trees=_as_int(values.get("aux_n_trees", 100), "aux_n_trees"),
            max_features=_parse_max_features(values.get("aux_max_features"), "aux_max_features"),
            bootstrap=_as_bool(values.get("aux_bootstrap", True), "aux_bootstrap"),
            seed=_as_int(values.get("aux_seed", 42), "aux_seed"),
            max_depth=_as_optional_int(values.get("aux_max_depth"), "aux_max_depth"),
            min_samples_split=_as_int(values.get("aux_min_samples_split", 2), "aux_min_samples_split"),
        )
        eval_learner = LearnerSpec(
            n_trees=_as_int(values.get("eval_n_trees", 100), "eval_n_trees"),
            max_features=_parse_max_features(values.get("eval_max_features"), "eval_max_features"),
            bootstrap=_as_bool(values.get("eval_bootstrap", True), "eval_bootstrap"),
            seed=_as_int(values.get("eval_seed", 42), "eval_seed"),
            max_depth=_as_optional_int(values.get("eval_max_depth"), "eval_max_depth"),
            min_samples_split=_as_int(values.get("eval_min_samples_split", 2), "eval_min_samples_split"),
            n_jobs=threads,
        )
        augment = AugmentConfig(
            target=target,
            mode=AugmentMode.parse(values["augment_mode"]) if "augment_mode" in values else default_aug_mode,
            rounds=_as_int(values.get("rounds", 1), "rounds"),
            learner=aux_learner,
            weighting=weighting,
            residual_source=source,
            round_decimals=decimals,
            test_fraction=_as_float(values.get("test_fraction", 0.2), "test_fraction"),
            split_seed=_as_int(values.get("split_seed", 42), "split_seed"),
            oof_folds=_as_int(values.get("oof_folds", 5), "oof_folds"),
            ratio_warning=_as_float(values.get("ratio_warning", 10.0), "ratio_warning"),
            n_jobs=threads,
        )
        evaluation = EvalConfig(
            k=_as_int(values.get("eval_k", 5), "eval_k"),
            learner=eval_learner,
            shuffle_folds=_as_bool(values.get("shuffle_folds", False), "shuffle_folds"),
            seed=_as_int(values.get("eval_seed", 42), "eval_seed"),
        )
        return cls(
            source=str(values["source"]).strip(),
            target=target,
            task=task,
            zip_member=str(values.get("zip_member", "bank-additional/bank-additional.csv")).strip(),
            separator=_as_text(values.get("separator", ";")),
            missing_values=_as_list(values.get("missing_values")),
            sample_fraction=_as_float(values.get("sample_fraction", 1.0), "sample_fraction"),
            sample_seed=_as_int(values.get("sample_seed", 42), "sample_seed"),
            drop_columns=_as_list(values.get("drop_columns")),
            regression_target=RegressionTarget.parse(values.get("regression_target", "binarized")),
            mode=mode_name,
            augment=augment,
            evaluation=evaluation,
            out_dir=str(values.get("out_dir", "out")).strip(),
            cache_dir=str(values.get("cache_dir", ".resaug-cache")).strip(),
            threads=threads,
            emit_augmented=_as_bool(values.get("emit_augmented", False), "emit_augmented"),
            seed_sweep=[_as_int(s, "seed_sweep") for s in _as_list(values.get("seed_sweep"))],
            record_hygienic=_as_bool(values.get("record_hygienic", False), "record_hygienic"),
        )


CONFIG_KEYS = (
    "source", "zip_member", "separator", "missing_values", "sample_fraction", "sample_seed",
    "drop_columns", "target", "task", "regression_target", "mode", "augment_mode", "rounds",
    "weighting", "residual_source", "round_decimals", "test_fraction", "split_seed", "oof_folds",
    "ratio_warning", "aux_n_trees", "aux_max_features", "aux_bootstrap", "aux_seed", "aux_max_depth",
    "aux_min_samples_split", "eval_k", "eval_n_trees", "eval_max_features", "eval_bootstrap", "eval_seed",
    "eval_max_depth", "eval_min_samples_split", "shuffle_folds",
    "seed_sweep", "record_hygienic", "out_dir", "cache_dir", "threads", "emit_augmented",
)


class StoreConfig:
    """Configuration class for the DuckDB artifact catalog"""

    def __init__(self,
                 name: str = "default",
                 location: StoreLocation = StoreLocation.MEMORY,
                 filename: Optional[str] = None,
                 settings: Dict[str, Any] = None):
        """
        Initialize catalog configuration

        Args:
            name: Name of the connection (used as identifier for instance management)
            location: Catalog location (memory or file)
            filename: Database filename (required if location is FILE)
            settings: DuckDB configuration settings
        """
        self.name = name
        self.location = location
        self.filename = filename
        self.settings = settings or {}

        if self.location is StoreLocation.FILE and not self.filename:
            raise ConfigError("Filename must be provided for FILE location")
