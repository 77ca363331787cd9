"""
Attribute model banks and residual feature columns

A bank holds one regressor per attribute, each predicting that attribute from
the remaining ones, trained on the rows of one target class (or on all rows).
Every bank contributes one residual column per attribute: the absolute gap
between the attribute and the bank's prediction of it, weighted by the square
of the model's held-out R².
"""
import logging
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from joblib import Parallel, delayed

from .config import AugmentConfig, AugmentMode, ResidualSource, TaskType, Weighting
from .evaluation import fold_bounds
from .exceptions import (AugmentError, DegenerateInputError, DegeneratePartitionError,
                         LearnerError, ValidationError)
from .ingest import FrameTable
from .learner import (ModelFitness, RandomForest, fit_forest, predict, r_squared,
                      read_model_file, train_test_split, write_model_file)
from .utils import stable_hash

logger = logging.getLogger(__name__)

ALL_ROWS = "all"
SINGLE_BANK_SUFFIX = "new"
BINARY_LABELS = (0.0, 1.0)

TargetValue = Union[float, str]


class AttributeModelBank:
    """Per-attribute models and their held-out fitness for one target partition"""

    def __init__(self, target_value: TargetValue, suffix: str, attributes: Sequence[str],
                 models: Dict[str, RandomForest], fitness: Dict[str, ModelFitness]):
        """
        Initialize a bank

        Args:
            target_value: Class label of the partition, or 'all' in single-bank mode
            suffix: Column-name suffix of the residuals this bank emits
            attributes: Attribute names in partition column order
            models: Attribute name to forest trained on the other attributes
            fitness: Attribute name to held-out R²
        """
        if set(models) != set(attributes) or set(fitness) != set(attributes):
            raise AugmentError(f"Bank '{suffix}' models and fitness must cover exactly the attributes")
        self.target_value = target_value
        self.suffix = suffix
        self.attributes = list(attributes)
        self.models = models
        self.fitness = fitness

    def __len__(self):
        return len(self.attributes)

    def feature_names(self, attribute: str) -> List[str]:
        """Columns a model sees, in training order"""
        return [a for a in self.attributes if a != attribute]

    def fitness_table(self) -> List[Dict]:
        return [
            {"bank": self.suffix, "attribute": a, **self.fitness[a].to_dict()}
            for a in self.attributes
        ]

    def to_meta(self) -> Dict:
        return {
            "target_value": self.target_value,
            "suffix": self.suffix,
            "attributes": self.attributes,
            "fitness": {a: self.fitness[a].to_dict() for a in self.attributes},
        }


def save_banks(path: str, banks: Sequence[AttributeModelBank]) -> None:
    """Write banks into one model file, forests in bank then attribute order"""
    forests = [bank.models[a] for bank in banks for a in bank.attributes]
    write_model_file(path, {"banks": [bank.to_meta() for bank in banks]}, forests)


def load_banks(path: str) -> List[AttributeModelBank]:
    meta, forests = read_model_file(path)
    banks = []
    position = 0
    for bank_meta in meta["banks"]:
        attributes = bank_meta["attributes"]
        models = dict(zip(attributes, forests[position:position + len(attributes)]))
        position += len(attributes)
        fitness = {a: ModelFitness(**bank_meta["fitness"][a]) for a in attributes}
        banks.append(AttributeModelBank(bank_meta["target_value"], bank_meta["suffix"],
                                        attributes, models, fitness))
    return banks


def _label_suffix(value: float) -> str:
    return str(int(value)) if float(value).is_integer() else repr(float(value))


def split_residual_name(name: str) -> Tuple[str, str]:
    """Source attribute and bank suffix of a residual column name"""
    attribute, sep, suffix = name.rpartition("_")
    if not sep or not attribute or not suffix:
        raise ValidationError(f"'{name}' is not a residual column name")
    return attribute, suffix


def partition_by_target(t: FrameTable, target: str) -> List[Tuple[float, FrameTable]]:
    """
    Rows split by binary target value, ascending, with the target column removed

    Raises:
        ValidationError: target values outside {0, 1}
        DegeneratePartitionError: one class has no rows
    """
    labels = t.column(target)
    unexpected = sorted(set(np.unique(labels)) - set(BINARY_LABELS))
    if unexpected:
        raise ValidationError(f"Per-class banks need a 0/1 target; '{target}' also holds {unexpected[:5]}")
    attributes = t.drop([target])
    partitions = []
    for value in BINARY_LABELS:
        rows = np.flatnonzero(labels == value)
        if rows.size == 0:
            raise DegeneratePartitionError(f"No rows with {target} = {_label_suffix(value)}")
        partitions.append((value, attributes.take(rows)))
    return partitions


def _fit_attribute(partition: FrameTable, attribute: str, cfg: AugmentConfig):
    features = partition.drop([attribute])
    target = partition.column(attribute)
    X_train, X_test, y_train, y_test = train_test_split(features, target, cfg.test_fraction, cfg.split_seed)
    spec = cfg.learner
    forest = fit_forest(X_train, y_train, TaskType.REGRESSION, n_trees=spec.n_trees,
                        max_features=spec.resolve_max_features(TaskType.REGRESSION, features.n_cols),
                        seed=spec.seed, bootstrap=spec.bootstrap,
                        max_depth=spec.max_depth, min_samples_split=spec.min_samples_split)
    fitness = r_squared(y_test, predict(forest, X_test))
    if logger.isEnabledFor(logging.DEBUG):
        logger.debug("attribute %s: r2=%.5f, deepest tree %d", attribute, fitness.r_squared,
                     max(tree.depth() for tree in forest.trees))
    return forest, fitness


def _fit_attribute_annotated(partition: FrameTable, attribute: str, cfg: AugmentConfig):
    try:
        return _fit_attribute(partition, attribute, cfg)
    except (LearnerError, ValidationError) as e:
        raise type(e)(f"attribute '{attribute}': {e}") from e


def train_attribute_models(partition: FrameTable, cfg: AugmentConfig,
                           target_value: TargetValue = ALL_ROWS,
                           suffix: str = SINGLE_BANK_SUFFIX) -> AttributeModelBank:
    """
    Fit one forest per attribute on an 80/20 split of the partition; the held-out part gives its R²

    Args:
        partition: Attribute columns only (target removed)
        cfg: Augmentation configuration
        target_value: Label of the partition, or 'all'
        suffix: Residual column suffix of this bank
    """
    if partition.n_rows < 2:
        raise DegenerateInputError(f"Bank '{suffix}' needs at least 2 rows, got {partition.n_rows}")
    if partition.n_cols < 2:
        raise AugmentError(f"Bank '{suffix}' needs at least 2 attribute columns, got {partition.n_cols}")

    attributes = partition.column_names
    logger.info("Training %d attribute models for bank '%s' on %d rows",
                len(attributes), suffix, partition.n_rows)
    results = Parallel(n_jobs=cfg.n_jobs, prefer="threads")(
        delayed(_fit_attribute_annotated)(partition, a, cfg) for a in attributes)
    models = {a: forest for a, (forest, _) in zip(attributes, results)}
    fitness = {a: fit for a, (_, fit) in zip(attributes, results)}
    return AttributeModelBank(target_value, suffix, attributes, models, fitness)


def weigh_residuals(actual, predicted, r2: float, weighting: Weighting = Weighting.FAITHFUL,
                    round_decimals: Optional[int] = 4) -> np.ndarray:
    """|actual - predicted|, optionally rounded, times the squared (clamped when CLAMPED) r²"""
    gap = np.abs(np.asarray(actual, dtype=np.float64) - np.asarray(predicted, dtype=np.float64))
    if round_decimals is not None:
        gap = np.round(gap, round_decimals)
    if weighting is Weighting.CLAMPED:
        r2 = min(max(r2, 0.0), 1.0)
    return gap * r2 ** 2


def _out_of_fold(t: FrameTable, rows: np.ndarray, bank: AttributeModelBank, attribute: str,
                 cfg: AugmentConfig) -> np.ndarray:
    """Predictions for the bank's own rows from forests that never saw them"""
    features = t.select(bank.feature_names(attribute)).data[rows]
    target = t.column(attribute)[rows]
    n = rows.size
    k = min(cfg.oof_folds, n)
    out = np.empty(n)
    spec = cfg.learner
    if k < 2:
        return predict(bank.models[attribute], features)
    for fold, (lo, hi) in enumerate(fold_bounds(n, k)):
        train = np.r_[0:lo, hi:n]
        forest = fit_forest(features[train], target[train], TaskType.REGRESSION, n_trees=spec.n_trees,
                            max_features=spec.resolve_max_features(TaskType.REGRESSION, features.shape[1]),
                            seed=spec.seed + fold, bootstrap=spec.bootstrap,
                            max_depth=spec.max_depth, min_samples_split=spec.min_samples_split)
        out[lo:hi] = predict(forest, features[lo:hi])
    return out


def _residual_column(t: FrameTable, bank: AttributeModelBank, attribute: str, own_rows: Optional[np.ndarray],
                     cfg: AugmentConfig) -> np.ndarray:
    actual = t.column(attribute)
    predicted = predict(bank.models[attribute], t.select(bank.feature_names(attribute)))
    if own_rows is not None and own_rows.size:
        predicted[own_rows] = _out_of_fold(t, own_rows, bank, attribute, cfg)
    return weigh_residuals(actual, predicted, bank.fitness[attribute].r_squared, cfg.weighting,
                           cfg.round_decimals)


def residual_features(t: FrameTable, banks: Sequence[AttributeModelBank], cfg: AugmentConfig) -> FrameTable:
    """
    Residual columns for every row: per attribute, one column per bank in bank order,
    named '<attribute>_<bank suffix>'

    Args:
        t: Table holding the target and every bank attribute
        banks: Trained banks, all over the same attributes
        cfg: Augmentation configuration
    """
    if not banks:
        raise AugmentError("residual_features needs at least one bank")
    if cfg.target not in t:
        raise ValidationError(f"Target '{cfg.target}' not found")
    attributes = banks[0].attributes
    for bank in banks:
        if bank.attributes != attributes:
            raise ValidationError(f"Bank '{bank.suffix}' covers different attributes")
    missing = [a for a in attributes if a not in t]
    if missing:
        raise ValidationError(f"Columns missing for bank attributes: {', '.join(missing[:5])}")

    names = [f"{a}_{bank.suffix}" for a in attributes for bank in banks]
    clashes = [n for n in names if n in t]
    if clashes:
        raise ValidationError(f"Residual column names clash with existing columns: {', '.join(clashes[:5])}")

    own_rows = {}
    if cfg.residual_source is ResidualSource.OUT_OF_FOLD:
        labels = t.column(cfg.target)
        for bank in banks:
            if bank.target_value == ALL_ROWS:
                own_rows[bank.suffix] = np.arange(t.n_rows)
            else:
                own_rows[bank.suffix] = np.flatnonzero(labels == float(bank.target_value))

    pairs = [(a, bank) for a in attributes for bank in banks]
    columns = Parallel(n_jobs=cfg.n_jobs, prefer="threads")(
        delayed(_residual_column)(t, bank, a, own_rows.get(bank.suffix), cfg) for a, bank in pairs)
    data = np.column_stack(columns) if columns else np.empty((t.n_rows, 0))
    return FrameTable(names, data)


def bank_cache_key(t: FrameTable, cfg: AugmentConfig, round_index: int) -> str:
    """Key of the banks trained for this table, config and round"""
    return stable_hash({"augment": cfg.result_dict(), "round": round_index, "table": t.fingerprint()}, length=32)


def build_banks(t: FrameTable, cfg: AugmentConfig) -> List[AttributeModelBank]:
    attributes = t.drop([cfg.target])
    if cfg.mode is AugmentMode.PER_CLASS:
        return [train_attribute_models(part, cfg, value, _label_suffix(value))
                for value, part in partition_by_target(t, cfg.target)]
    return [train_attribute_models(attributes, cfg, ALL_ROWS, SINGLE_BANK_SUFFIX)]


def augment_dataset(t: FrameTable, cfg: AugmentConfig, bank_cache=None,
                    round_index: int = 0) -> Tuple[FrameTable, List[AttributeModelBank]]:
    """
    One round: train banks, emit residual columns, place them before all original columns

    Args:
        t: Table with the target and its attributes
        cfg: Augmentation configuration
        bank_cache: Optional object with find(key) and save(key, banks)
        round_index: Round number, part of the cache key
    """
    if cfg.target not in t:
        raise ValidationError(f"Target '{cfg.target}' not found")
    if t.n_cols < 2:
        raise AugmentError("Cannot augment a table without attribute columns")

    banks = None
    key = None
    if bank_cache is not None:
        key = bank_cache_key(t, cfg, round_index)
        banks = bank_cache.find(key)
        if banks is not None:
            logger.info("Round %d: reusing cached banks %s", round_index + 1, key)
    if banks is None:
        banks = build_banks(t, cfg)
        if bank_cache is not None:
            bank_cache.save(key, banks)

    residuals = residual_features(t, banks, cfg)
    return residuals.hstack(t), banks


class RoundSummary:
    """What one augmentation round produced"""

    def __init__(self, round_index: int, banks: List[AttributeModelBank], n_rows: int, n_cols: int,
                 warnings: List[str]):
        self.round_index = round_index
        self.banks = banks
        self.n_rows = n_rows
        self.n_cols = n_cols
        self.warnings = warnings

    @property
    def ratio(self) -> float:
        return self.n_rows / self.n_cols if self.n_cols else float("inf")

    def to_dict(self) -> Dict:
        models = sum(len(b) for b in self.banks)
        return {
            "round": self.round_index + 1,
            "attributes": len(self.banks[0]) if self.banks else 0,
            "banks": len(self.banks),
            "models": models,
            "new_columns": models,
            "rows": self.n_rows,
            "columns": self.n_cols,
            "rows_per_column": self.ratio,
        }


def iterate_rounds(t: FrameTable, cfg: AugmentConfig, history: Optional[List[RoundSummary]] = None,
                   bank_cache=None) -> FrameTable:
    """
    Apply augment_dataset cfg.rounds times; each round treats every current non-target column as an attribute

    Args:
        t: Preprocessed table
        cfg: Augmentation configuration
        history: When given, one RoundSummary is appended per round
        bank_cache: Optional bank cache passed to every round
    """
    if cfg.rounds < 1:
        raise ValidationError(f"rounds must be at least 1, got {cfg.rounds}")
    table = t
    for round_index in range(cfg.rounds):
        table, banks = augment_dataset(table, cfg, bank_cache=bank_cache, round_index=round_index)
        warnings = []
        ratio = table.n_rows / table.n_cols
        if ratio < cfg.ratio_warning:
            message = (f"round {round_index + 1}: rows/columns ratio {ratio:.2f} is below "
                       f"{cfg.ratio_warning:g}; the final model may be hindered")
            logger.warning(message)
            warnings.append(message)
        logger.info("Round %d: %d banks, %d rows x %d columns", round_index + 1, len(banks),
                    table.n_rows, table.n_cols)
        if history is not None:
            history.append(RoundSummary(round_index, banks, table.n_rows, table.n_cols, warnings))
    return table
