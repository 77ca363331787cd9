"""
Cross-validated comparison of a final model on the original and the augmented table
"""
import json
import logging
from collections import OrderedDict
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from .config import LearnerSpec, TaskType
from .exceptions import EvalError, ValidationError
from .ingest import FrameTable
from .learner import fit_forest, predict

logger = logging.getLogger(__name__)

REPORT_SCHEMA = "residual-augment/report"
REPORT_SCHEMA_VERSION = 1


def fold_bounds(n_rows: int, k: int) -> List[Tuple[int, int]]:
    """Contiguous [lo, hi) fold ranges; the first n_rows % k folds hold one extra row"""
    if k < 2:
        raise ValidationError(f"k must be at least 2, got {k}")
    if n_rows < k:
        raise ValidationError(f"Cannot split {n_rows} rows into {k} folds")
    sizes = np.full(k, n_rows // k, dtype=np.int64)
    sizes[:n_rows % k] += 1
    stops = np.cumsum(sizes)
    return [(int(stop - size), int(stop)) for size, stop in zip(sizes, stops)]


def fold_rows(n_rows: int, k: int, shuffle: bool = False, seed: int = 42) -> List[np.ndarray]:
    """Row indices of every fold, in current row order unless shuffle is set"""
    order = np.random.default_rng(seed).permutation(n_rows) if shuffle else np.arange(n_rows)
    return [order[lo:hi] for lo, hi in fold_bounds(n_rows, k)]


def fold_seed(seed: int, fold: int) -> int:
    """Model seed of one fold, derived from (seed, fold index)"""
    return int(np.random.SeedSequence([seed % 2 ** 64, fold]).generate_state(1, dtype=np.uint32)[0])


def _fit_fold(spec: LearnerSpec, X: np.ndarray, y: np.ndarray, train: np.ndarray, test: np.ndarray,
              task: TaskType, seed: int, fold: int) -> np.ndarray:
    forest = fit_forest(X[train], y[train], task, n_trees=spec.n_trees,
                        max_features=spec.resolve_max_features(task, X.shape[1]),
                        seed=fold_seed(seed, fold), bootstrap=spec.bootstrap,
                        max_depth=spec.max_depth, min_samples_split=spec.min_samples_split)
    return predict(forest, X[test])


def kfold_predict(spec: LearnerSpec, X, y, k: int, seed: int,
                  task: TaskType = TaskType.CLASSIFICATION, shuffle: bool = False) -> np.ndarray:
    """
    Out-of-fold predictions aligned to the input rows

    Args:
        spec: Forest specification of the final model (n_jobs sets the fold threads)
        X: Feature matrix or FrameTable
        y: Target column
        k: Number of folds
        seed: Base of the per-fold model seeds
        task: Final model task
        shuffle: Shuffle rows with seed before assigning folds
    """
    data = X.data if isinstance(X, FrameTable) else np.asarray(X, dtype=np.float64)
    values = np.asarray(y, dtype=np.float64)
    n = data.shape[0]
    if values.shape[0] != n:
        raise ValidationError(f"X has {n} rows but y has {values.shape[0]} values")
    folds = fold_rows(n, k, shuffle, seed)

    jobs = []
    for fold, test in enumerate(folds):
        train = np.concatenate([rows for j, rows in enumerate(folds) if j != fold])
        jobs.append(delayed(_fit_fold)(spec, data, values, train, test, task, seed, fold))
    results = Parallel(n_jobs=spec.n_jobs, prefer="threads")(jobs)

    out = np.empty(n)
    for test, predictions in zip(folds, results):
        out[test] = predictions
    return out


class MetricsBundle:
    """Metrics of one set of predictions"""

    def __init__(self, task: TaskType, precision: Optional[float] = None, recall: Optional[float] = None,
                 f1: Optional[float] = None, accuracy: Optional[float] = None, rmse: Optional[float] = None,
                 fold_count: int = 1, per_fold: Optional[List[Dict[str, float]]] = None,
                 warnings: Optional[List[str]] = None):
        self.task = task
        self.precision = precision
        self.recall = recall
        self.f1 = f1
        self.accuracy = accuracy
        self.rmse = rmse
        self.fold_count = fold_count
        self.per_fold = per_fold or []
        self.warnings = warnings or []

    @property
    def headline(self) -> float:
        """F1 for classification, RMSE for regression"""
        return self.f1 if self.task is TaskType.CLASSIFICATION else self.rmse

    def scores(self) -> Dict[str, float]:
        if self.task is TaskType.CLASSIFICATION:
            return OrderedDict([("precision", self.precision), ("recall", self.recall),
                                ("f1", self.f1), ("accuracy", self.accuracy)])
        return OrderedDict([("rmse", self.rmse)])

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary representation"""
        result = OrderedDict([("task", self.task.value)])
        result.update(self.scores())
        result["fold_count"] = self.fold_count
        result["per_fold"] = self.per_fold
        return result

    def __eq__(self, other):
        if not isinstance(other, MetricsBundle):
            return NotImplemented
        return self.to_dict() == other.to_dict()


def _paired(y_true, y_pred) -> Tuple[np.ndarray, np.ndarray]:
    truth = np.asarray(y_true, dtype=np.float64).ravel()
    guess = np.asarray(y_pred, dtype=np.float64).ravel()
    if truth.shape != guess.shape:
        raise ValidationError(f"Length mismatch: {truth.size} true vs {guess.size} predicted values")
    if truth.size < 1:
        raise ValidationError("Metrics need at least one value")
    return truth, guess


def _ratio(numerator: int, denominator: int, name: str, warnings: List[str], quiet: bool) -> float:
    if denominator == 0:
        message = f"{name} is undefined (zero denominator); reported as 0"
        if not quiet:
            logger.warning(message)
        warnings.append(message)
        return 0.0
    return numerator / denominator


def classification_metrics(y_true, y_pred, quiet: bool = False) -> MetricsBundle:
    """Precision, recall, F1 and accuracy with label 1 as the positive class; quiet skips warning logs"""
    truth, guess = _paired(y_true, y_pred)
    for name, column in (("y_true", truth), ("y_pred", guess)):
        if not np.isin(column, (0.0, 1.0)).all():
            raise ValidationError(f"{name} must hold only 0/1 values")
    tp = int(np.sum((truth == 1) & (guess == 1)))
    fp = int(np.sum((truth == 0) & (guess == 1)))
    fn = int(np.sum((truth == 1) & (guess == 0)))
    warnings = []
    precision = _ratio(tp, tp + fp, "precision", warnings, quiet)
    recall = _ratio(tp, tp + fn, "recall", warnings, quiet)
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    accuracy = float(np.mean(truth == guess))
    return MetricsBundle(TaskType.CLASSIFICATION, precision=precision, recall=recall, f1=f1,
                         accuracy=accuracy, warnings=warnings)


def regression_metrics(y_true, y_pred) -> MetricsBundle:
    """Root mean squared error"""
    truth, guess = _paired(y_true, y_pred)
    rmse = float(np.sqrt(np.mean((truth - guess) ** 2)))
    return MetricsBundle(TaskType.REGRESSION, rmse=rmse)


def _metrics(task: TaskType, y_true, y_pred, quiet: bool = False) -> MetricsBundle:
    if task is TaskType.CLASSIFICATION:
        return classification_metrics(y_true, y_pred, quiet)
    return regression_metrics(y_true, y_pred)


def evaluate_table(t: FrameTable, target: str, spec: LearnerSpec, k: int, seed: int,
                   task: TaskType, shuffle: bool = False) -> MetricsBundle:
    """Pooled out-of-fold metrics of one table, with per-fold metrics attached"""
    X = t.drop([target])
    y = t.column(target)
    if X.n_cols == 0:
        raise EvalError("No feature columns besides the target")
    predictions = kfold_predict(spec, X, y, k, seed, task, shuffle)
    pooled = _metrics(task, y, predictions)
    for rows in fold_rows(t.n_rows, k, shuffle, seed):
        # undefined ratios inside a single fold are not run warnings
        fold = _metrics(task, y[rows], predictions[rows], quiet=True)
        pooled.per_fold.append(dict(fold.scores()))
    pooled.fold_count = k
    return pooled


class ComparisonReport:
    """Baseline versus augmented metrics with everything needed to audit and reproduce the run"""

    def __init__(self, task: TaskType, target: str, baseline: MetricsBundle, augmented: MetricsBundle,
                 config: Optional[Dict[str, Any]] = None,
                 stage_counts: Optional[Dict[str, Dict[str, int]]] = None,
                 shapes: Optional[Dict[str, Dict[str, int]]] = None,
                 rounds: Optional[List[Dict[str, Any]]] = None,
                 fitness: Optional[List[Dict[str, Any]]] = None,
                 warnings: Optional[List[str]] = None,
                 extras: Optional[Dict[str, Any]] = None,
                 config_hash: Optional[str] = None):
        """
        Initialize a report

        Args:
            task: Final model task
            target: Target column
            baseline: Metrics on the original table
            augmented: Metrics on the augmented table
            config: Flat config echo
            stage_counts: Rows and columns after every preprocessing stage
            shapes: Row/column counts of the original and augmented tables
            rounds: Per-round structure counts
            fitness: Per-bank, per-attribute held-out R² table
            warnings: Conditions worth a reader's attention
            extras: Seed sweep and hygienic-mode records
            config_hash: Identifier of the result-relevant config
        """
        self.task = task
        self.target = target
        self.baseline = baseline
        self.augmented = augmented
        self.config = config or {}
        self.stage_counts = stage_counts or {}
        self.shapes = shapes or {}
        self.rounds = rounds or []
        self.fitness = fitness or []
        self.warnings = warnings or []
        self.extras = extras or {}
        self.config_hash = config_hash

    @property
    def improved(self) -> bool:
        """Whether the augmented headline metric beats the baseline one"""
        if self.task is TaskType.CLASSIFICATION:
            return self.augmented.f1 > self.baseline.f1
        return self.augmented.rmse < self.baseline.rmse

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary representation"""
        return OrderedDict([
            ("schema", REPORT_SCHEMA),
            ("schema_version", REPORT_SCHEMA_VERSION),
            ("task", self.task.value),
            ("target", self.target),
            ("config_hash", self.config_hash),
            ("baseline", self.baseline.to_dict()),
            ("augmented", self.augmented.to_dict()),
            ("improved", self.improved),
            ("shapes", self.shapes),
            ("stage_counts", self.stage_counts),
            ("rounds", self.rounds),
            ("fitness", self.fitness),
            ("warnings", self.warnings),
            ("extras", self.extras),
            ("config", self.config),
        ])

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, allow_nan=False) + "\n"

    def to_text(self) -> str:
        """Human-readable rendering of the report"""
        metrics = pd.DataFrame(
            {"baseline": self.baseline.scores(), "augmented": self.augmented.scores()})
        sections = [
            f"Residual augmentation report ({self.task.value}, target '{self.target}')",
            "",
            "Cross-validated metrics (pooled predictions, %d folds):" % self.baseline.fold_count,
            metrics.to_string(float_format=lambda v: f"{v:.5f}"),
        ]
        if self.shapes:
            sections += ["", "Table shapes:", pd.DataFrame(self.shapes).T.to_string()]
        if self.stage_counts:
            sections += ["", "Preprocessing stages:", pd.DataFrame(self.stage_counts).T.to_string()]
        if self.rounds:
            sections += ["", "Augmentation rounds:",
                         pd.DataFrame(self.rounds).set_index("round").to_string()]
        if self.fitness:
            summary = pd.DataFrame(self.fitness).groupby("bank", sort=False)["r_squared"].describe()
            sections += ["", "Attribute model R² by bank (last round):",
                         summary[["count", "mean", "min", "max"]].to_string(float_format=lambda v: f"{v:.4f}")]
        if self.extras.get("seed_sweep"):
            sections += ["", "Seed sweep:", pd.DataFrame(self.extras["seed_sweep"]).to_string(index=False)]
        if self.extras.get("hygienic"):
            sections += ["", "Hygienic residuals (augmented, out-of-fold):",
                         pd.Series(self.extras["hygienic"]["augmented"]).drop(
                             ["task", "per_fold"], errors="ignore").to_string()]
        if self.warnings:
            sections += ["", "Warnings:"] + [f"  - {w}" for w in self.warnings]
        return "\n".join(sections) + "\n"


def compare(t_original: FrameTable, t_augmented: FrameTable, target: str, spec: LearnerSpec,
            k: int = 5, seed: int = 42, task: TaskType = TaskType.CLASSIFICATION,
            shuffle: bool = False, config: Optional[Dict[str, Any]] = None,
            stage_counts: Optional[Dict[str, Dict[str, int]]] = None,
            rounds: Optional[Sequence] = None,
            warnings: Optional[List[str]] = None) -> ComparisonReport:
    """
    Cross-validate the same learner on both tables and assemble the report

    Args:
        t_original: Preprocessed table
        t_augmented: Table after augmentation
        target: Target column present in both
        spec: Final model specification
        k: Folds
        seed: Base of the per-fold seeds
        task: Final model task
        shuffle: Shuffle rows before assigning folds
        config: Config echo stored in the report
        stage_counts: Preprocessing stage counts
        rounds: RoundSummary objects from iterate_rounds
        warnings: Warnings gathered by earlier stages
    """
    for name, t in (("original", t_original), ("augmented", t_augmented)):
        if target not in t:
            raise ValidationError(f"Target '{target}' not found in the {name} table")
    if t_original.n_rows != t_augmented.n_rows:
        raise ValidationError(f"Row count mismatch: {t_original.n_rows} original vs {t_augmented.n_rows} augmented")
    if not np.array_equal(t_original.column(target), t_augmented.column(target)):
        raise ValidationError(f"Target '{target}' differs between the original and augmented tables")

    logger.info("Evaluating baseline: %d rows x %d columns", t_original.n_rows, t_original.n_cols)
    baseline = evaluate_table(t_original, target, spec, k, seed, task, shuffle)
    logger.info("Evaluating augmented: %d rows x %d columns", t_augmented.n_rows, t_augmented.n_cols)
    augmented = evaluate_table(t_augmented, target, spec, k, seed, task, shuffle)

    collected = list(warnings or [])
    collected += [f"baseline: {w}" for w in baseline.warnings]
    collected += [f"augmented: {w}" for w in augmented.warnings]

    round_rows = []
    fitness = []
    for summary in rounds or []:
        round_rows.append(summary.to_dict())
        collected += summary.warnings
    if rounds:
        for bank in rounds[-1].banks:
            fitness += bank.fitness_table()

    shapes = OrderedDict([
        ("original", {"rows": t_original.n_rows, "columns": t_original.n_cols}),
        ("augmented", {"rows": t_augmented.n_rows, "columns": t_augmented.n_cols}),
    ])
    return ComparisonReport(task, target, baseline, augmented, config=config, stage_counts=stage_counts,
                            shapes=shapes, rounds=round_rows, fitness=fitness, warnings=collected)
