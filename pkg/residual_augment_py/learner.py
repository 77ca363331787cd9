"""
CART decision trees, bagged random forests, train/test splitting and the R² fitness measure
"""
import json
import logging
import math
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from joblib import Parallel, delayed

from . import kernels
from .config import TaskType
from .exceptions import DegenerateInputError, FormatError, ValidationError
from .ingest import FrameTable

logger = logging.getLogger(__name__)

MODEL_FORMAT = "residual-augment/forests"
MODEL_FORMAT_VERSION = 1

# Window of total sum of squares treated as zero; the fit then counts as perfect.
TSS_GUARD = 1e-5

ArrayLike = Union[FrameTable, np.ndarray]


def _as_matrix(X: ArrayLike) -> np.ndarray:
    data = X.data if isinstance(X, FrameTable) else np.asarray(X, dtype=np.float64)
    if data.ndim != 2:
        raise ValidationError(f"Expected a 2-D feature matrix, got shape {data.shape}")
    return np.ascontiguousarray(data, dtype=np.float64)


def _as_vector(y) -> np.ndarray:
    values = np.ascontiguousarray(np.asarray(y, dtype=np.float64))
    if values.ndim != 1:
        raise ValidationError(f"Expected a 1-D column, got shape {values.shape}")
    return values


def _check_training_data(X: np.ndarray, y: np.ndarray):
    if X.shape[0] != y.shape[0]:
        raise ValidationError(f"X has {X.shape[0]} rows but y has {y.shape[0]} values")
    if X.shape[0] < 1:
        raise DegenerateInputError("Cannot fit a tree on 0 rows")
    if not np.isfinite(X).all() or not np.isfinite(y).all():
        raise ValidationError("Training data contains non-finite values")


def _kernel_task(task: TaskType) -> int:
    return kernels.TASK_CLASSIFICATION if task is TaskType.CLASSIFICATION else kernels.TASK_REGRESSION


def tree_stream(seed: int, index: int) -> np.random.Generator:
    """Counter-based random stream for one tree, independent of training order"""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed % 2 ** 64, index])))


class DecisionTree:
    """Fitted CART tree stored as flat node arrays"""

    def __init__(self, feature: np.ndarray, threshold: np.ndarray, left: np.ndarray,
                 right: np.ndarray, value: np.ndarray, task: TaskType,
                 classes: Optional[np.ndarray] = None):
        self.feature = feature
        self.threshold = threshold
        self.left = left
        self.right = right
        # leaf mean (regression) or index into classes (classification)
        self.value = value
        self.task = task
        self.classes = classes

    @property
    def n_nodes(self) -> int:
        return self.feature.shape[0]

    def depth(self) -> int:
        depths = np.zeros(self.n_nodes, dtype=np.int64)
        for node in range(self.n_nodes):
            if self.feature[node] >= 0:
                depths[self.left[node]] = depths[node] + 1
                depths[self.right[node]] = depths[node] + 1
        return int(depths.max()) if self.n_nodes else 0

    def predict(self, X: ArrayLike) -> np.ndarray:
        data = _as_matrix(X)
        if data.shape[0] == 0:
            return np.empty(0)
        out = kernels.predict_tree(self.feature, self.threshold, self.left, self.right, self.value, data)
        if self.task is TaskType.CLASSIFICATION:
            return self.classes[out.astype(np.int64)]
        return out


class RandomForest:
    """Bagged ensemble of CART trees"""

    def __init__(self, trees: List[DecisionTree], task: TaskType, n_features: int,
                 max_features: int, seed: int, bootstrap: bool = True,
                 classes: Optional[np.ndarray] = None,
                 feature_names: Optional[List[str]] = None,
                 max_depth: Optional[int] = None, min_samples_split: int = 2):
        self.trees = trees
        self.task = task
        self.n_features = n_features
        self.max_features = max_features
        self.seed = seed
        self.bootstrap = bootstrap
        self.classes = classes
        self.feature_names = feature_names
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self._packed = None

    @property
    def n_trees(self) -> int:
        return len(self.trees)

    def _pack(self):
        if self._packed is None:
            sizes = [t.n_nodes for t in self.trees]
            offsets = np.zeros(len(sizes) + 1, dtype=np.int64)
            offsets[1:] = np.cumsum(sizes)
            self._packed = (
                np.concatenate([t.feature for t in self.trees]),
                np.concatenate([t.threshold for t in self.trees]),
                np.concatenate([t.left for t in self.trees]),
                np.concatenate([t.right for t in self.trees]),
                np.concatenate([t.value for t in self.trees]),
                offsets,
            )
        return self._packed

    def check_schema(self, X: ArrayLike):
        """ValidationError naming the first column that differs from the training schema"""
        if isinstance(X, FrameTable) and self.feature_names is not None:
            if X.column_names != self.feature_names:
                for j, expected in enumerate(self.feature_names):
                    got = X.column_names[j] if j < X.n_cols else None
                    if got != expected:
                        raise ValidationError(
                            f"Schema mismatch at position {j}: expected column '{expected}', got '{got}'")
                raise ValidationError(f"Unexpected column '{X.column_names[len(self.feature_names)]}'")
        n_cols = X.n_cols if isinstance(X, FrameTable) else np.asarray(X).shape[1]
        if n_cols != self.n_features:
            raise ValidationError(f"Expected {self.n_features} feature columns, got {n_cols}")

    def to_arrays(self) -> Dict[str, np.ndarray]:
        feature, threshold, left, right, value, offsets = self._pack()
        arrays = {"feature": feature.astype(np.int32), "threshold": threshold,
                  "left": left.astype(np.int32), "right": right.astype(np.int32),
                  "value": value, "offsets": offsets}
        if self.classes is not None:
            arrays["classes"] = self.classes
        return arrays

    def to_meta(self) -> Dict:
        return {
            "task": self.task.value,
            "n_features": self.n_features,
            "max_features": self.max_features,
            "seed": self.seed,
            "bootstrap": self.bootstrap,
            "feature_names": self.feature_names,
            "max_depth": self.max_depth,
            "min_samples_split": self.min_samples_split,
        }

    @classmethod
    def from_arrays(cls, meta: Dict, arrays: Dict[str, np.ndarray]) -> "RandomForest":
        task = TaskType.parse(meta["task"])
        classes = arrays.get("classes")
        offsets = arrays["offsets"]
        trees = []
        for t in range(len(offsets) - 1):
            part = slice(int(offsets[t]), int(offsets[t + 1]))
            trees.append(DecisionTree(
                arrays["feature"][part].astype(np.int64), arrays["threshold"][part].copy(),
                arrays["left"][part].astype(np.int64), arrays["right"][part].astype(np.int64),
                arrays["value"][part].copy(), task, classes))
        return cls(trees, task, meta["n_features"], meta["max_features"], meta["seed"],
                   meta["bootstrap"], classes, meta.get("feature_names"),
                   max_depth=meta.get("max_depth"), min_samples_split=meta.get("min_samples_split", 2))


class ModelFitness:
    """Coefficient of determination with its sums of squares"""

    def __init__(self, r_squared: float, tss: float, rss: float):
        self.r_squared = r_squared
        self.tss = tss
        self.rss = rss

    def to_dict(self) -> Dict[str, float]:
        return {"r_squared": self.r_squared, "tss": self.tss, "rss": self.rss}

    def __repr__(self):
        return f"ModelFitness(r_squared={self.r_squared!r}, tss={self.tss!r}, rss={self.rss!r})"


def train_test_split(X: ArrayLike, y, test_fraction: float, seed: int) -> Tuple:
    """
    Seeded shuffle split with round(test_fraction * n) test rows

    Returns:
        (X_train, X_test, y_train, y_test); X parts keep the input type
    """
    values = _as_vector(y)
    n = X.n_rows if isinstance(X, FrameTable) else np.asarray(X).shape[0]
    if n != values.shape[0]:
        raise ValidationError(f"X has {n} rows but y has {values.shape[0]} values")
    if not 0.0 < test_fraction < 1.0:
        raise ValidationError(f"test_fraction must lie in (0, 1), got {test_fraction}")
    if n < 2:
        raise DegenerateInputError(f"Cannot split {n} rows into train and test parts")
    n_test = min(max(int(math.floor(test_fraction * n + 0.5)), 1), n - 1)
    order = np.random.default_rng(seed).permutation(n)
    test_rows, train_rows = order[:n_test], order[n_test:]
    if isinstance(X, FrameTable):
        return X.take(train_rows), X.take(test_rows), values[train_rows], values[test_rows]
    data = np.asarray(X)
    return data[train_rows], data[test_rows], values[train_rows], values[test_rows]


def _encode_labels(y: np.ndarray, task: TaskType):
    if task is TaskType.CLASSIFICATION:
        classes, encoded = np.unique(y, return_inverse=True)
        return classes, encoded.astype(np.float64), len(classes)
    return None, y, 1


def _grow(X: np.ndarray, y: np.ndarray, samples: np.ndarray, task: TaskType, n_classes: int,
          max_features: int, max_depth: Optional[int], min_samples_split: int,
          rng: np.random.Generator, classes) -> DecisionTree:
    seed = rng.integers(1, 2 ** 63, dtype=np.uint64)
    depth_cap = -1 if max_depth is None else max_depth
    arrays = kernels.build_tree(X, y, samples, _kernel_task(task), n_classes, max_features,
                                depth_cap, min_samples_split, np.uint64(seed))
    return DecisionTree(*arrays, task=task, classes=classes)


def fit_tree(X: ArrayLike, y, task: TaskType, max_features: Optional[int] = None,
             rng: Optional[np.random.Generator] = None, max_depth: Optional[int] = None,
             min_samples_split: int = 2) -> DecisionTree:
    """
    Grow one CART tree on every row

    Args:
        X: Feature matrix
        y: Target column
        task: REGRESSION (variance reduction, mean leaves) or CLASSIFICATION (Gini, majority leaves)
        max_features: Candidate features per split; None means all
        rng: Random stream used for feature sampling
        max_depth: Depth cap; None grows until nodes are pure or nothing improves
        min_samples_split: Nodes with fewer rows become leaves
    """
    data = _as_matrix(X)
    values = _as_vector(y)
    _check_training_data(data, values)
    classes, encoded, n_classes = _encode_labels(values, task)
    k = data.shape[1] if max_features is None else min(max_features, data.shape[1])
    rng = rng if rng is not None else tree_stream(0, 0)
    samples = np.arange(data.shape[0], dtype=np.int64)
    return _grow(data, encoded, samples, task, n_classes, k, max_depth, min_samples_split, rng, classes)


def _fit_member(data, encoded, task, n_classes, k, seed, index, bootstrap, max_depth, min_samples_split, classes):
    rng = tree_stream(seed, index)
    n = data.shape[0]
    if bootstrap:
        samples = rng.integers(0, n, size=n).astype(np.int64)
    else:
        samples = np.arange(n, dtype=np.int64)
    return _grow(data, encoded, samples, task, n_classes, k, max_depth, min_samples_split, rng, classes)


def fit_forest(X: ArrayLike, y, task: TaskType, n_trees: int = 100,
               max_features: Optional[int] = None, seed: int = 42,
               bootstrap: bool = True, n_jobs: int = 1, max_depth: Optional[int] = None,
               min_samples_split: int = 2) -> RandomForest:
    """
    Fit n_trees trees, each on its own bootstrap resample drawn from stream (seed, tree index)

    Args:
        X: Feature matrix (a FrameTable also records the column schema)
        y: Target column
        task: Regression or classification
        n_trees: Number of trees
        max_features: Candidate features per split; None means all
        seed: Base seed
        bootstrap: Draw n rows with replacement per tree
        n_jobs: Threads; results do not depend on it
        max_depth: Depth cap per tree; None for unlimited
        min_samples_split: Smallest node that is still split
    """
    if n_trees < 1:
        raise ValidationError("n_trees must be at least 1")
    if max_depth is not None and max_depth < 1:
        raise ValidationError("max_depth must be at least 1")
    if min_samples_split < 2:
        raise ValidationError("min_samples_split must be at least 2")
    data = _as_matrix(X)
    values = _as_vector(y)
    _check_training_data(data, values)
    classes, encoded, n_classes = _encode_labels(values, task)
    k = data.shape[1] if max_features is None else max(1, min(max_features, data.shape[1]))

    member = delayed(_fit_member)
    if n_jobs > 1 and n_trees > 1:
        trees = Parallel(n_jobs=n_jobs, prefer="threads")(
            member(data, encoded, task, n_classes, k, seed, t, bootstrap, max_depth, min_samples_split, classes)
            for t in range(n_trees))
    else:
        trees = [_fit_member(data, encoded, task, n_classes, k, seed, t, bootstrap, max_depth,
                             min_samples_split, classes)
                 for t in range(n_trees)]

    names = list(X.column_names) if isinstance(X, FrameTable) else None
    return RandomForest(list(trees), task, data.shape[1], k, seed, bootstrap, classes, names,
                        max_depth=max_depth, min_samples_split=min_samples_split)


def predict(model: RandomForest, X: ArrayLike) -> np.ndarray:
    """One prediction per row: tree mean (regression) or majority vote, ties to the smallest label"""
    model.check_schema(X)
    data = _as_matrix(X)
    if data.shape[0] == 0:
        return np.empty(0)
    feature, threshold, left, right, value, offsets = model._pack()
    n_classes = len(model.classes) if model.classes is not None else 1
    out = kernels.predict_forest(feature, threshold, left, right, value, offsets, data,
                                 _kernel_task(model.task), n_classes)
    if model.task is TaskType.CLASSIFICATION:
        return model.classes[out.astype(np.int64)].astype(np.float64)
    return out


def r_squared(y_true, y_pred) -> ModelFitness:
    """1 - rss/tss; a total sum of squares inside (-1e-5, 1e-5) yields 1"""
    truth = _as_vector(y_true)
    guess = _as_vector(y_pred)
    if truth.shape != guess.shape:
        raise ValidationError(f"Length mismatch: {truth.shape[0]} true vs {guess.shape[0]} predicted values")
    if truth.shape[0] < 1:
        raise ValidationError("r_squared needs at least one value")
    tss = float(np.sum((truth - np.mean(truth)) ** 2))
    rss = float(np.sum((truth - guess) ** 2))
    if -TSS_GUARD < tss < TSS_GUARD:
        return ModelFitness(1.0, tss, rss)
    return ModelFitness(1.0 - rss / tss, tss, rss)


def write_model_file(path: str, meta: Dict, forests: Sequence[RandomForest]) -> None:
    """
    Write forests into one versioned .npz file

    The 'meta' member is a JSON document (format, version, caller metadata, per-forest metadata);
    forest i stores its arrays under 'f{i}_<name>'.
    """
    document = {
        "format": MODEL_FORMAT,
        "format_version": MODEL_FORMAT_VERSION,
        "meta": meta,
        "forests": [forest.to_meta() for forest in forests],
    }
    members = {"meta": np.frombuffer(json.dumps(document).encode("utf-8"), dtype=np.uint8)}
    for i, forest in enumerate(forests):
        for name, array in forest.to_arrays().items():
            members[f"f{i}_{name}"] = array
    with open(path, "wb") as f:
        np.savez_compressed(f, **members)


def read_model_file(path: str) -> Tuple[Dict, List[RandomForest]]:
    """Inverse of write_model_file"""
    try:
        with np.load(path, allow_pickle=False) as archive:
            document = json.loads(archive["meta"].tobytes().decode("utf-8"))
            if document.get("format") != MODEL_FORMAT:
                raise FormatError(f"{path} is not a forest file")
            if document.get("format_version") != MODEL_FORMAT_VERSION:
                raise FormatError(f"{path} has unsupported format version {document.get('format_version')}")
            forests = []
            for i, forest_meta in enumerate(document["forests"]):
                prefix = f"f{i}_"
                arrays = {key[len(prefix):]: archive[key] for key in archive.files if key.startswith(prefix)}
                forests.append(RandomForest.from_arrays(forest_meta, arrays))
    except (OSError, ValueError, KeyError) as e:
        raise FormatError(f"Cannot read model file {path}: {e}")
    return document["meta"], forests
