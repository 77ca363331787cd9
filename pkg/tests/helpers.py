"""
Shared fixtures: toy bank-like CSV files, random tables and small configurations
"""
import os

import numpy as np

from residual_augment_py.config import AugmentConfig, AugmentMode, LearnerSpec
from residual_augment_py.ingest import FrameTable

TOY_HEADER = '"age";"job";"balance";"housing";"y"'
JOBS = ("admin.", "blue-collar", "services")


def toy_csv_text(n_rows: int = 40, seed: int = 7) -> str:
    """Semicolon-separated, fully quoted like the bank file; every third client subscribes"""
    rng = np.random.default_rng(seed)
    lines = [TOY_HEADER]
    for i in range(n_rows):
        subscribed = i % 3 == 0
        age = 25 + int(rng.integers(0, 40))
        job = JOBS[int(rng.integers(0, len(JOBS)))]
        balance = round(float(rng.normal(1500 if subscribed else 400, 150)), 2)
        housing = "yes" if rng.random() < 0.5 else "no"
        lines.append(f'{age};"{job}";{balance};"{housing}";"{"yes" if subscribed else "no"}"')
    return "\n".join(lines) + "\n"


def write_toy_csv(directory: str, name: str = "toy.csv", n_rows: int = 40, seed: int = 7) -> str:
    path = os.path.join(directory, name)
    with open(path, "w", encoding="utf-8") as f:
        f.write(toy_csv_text(n_rows, seed))
    return path


def write_toy_config(directory: str, source: str, **overrides) -> str:
    """Small classification run over a toy CSV; keyword arguments replace or add keys"""
    values = {
        "source": source,
        "separator": ";",
        "sample_fraction": 1.0,
        "sample_seed": 42,
        "target": "y_yes",
        "drop_columns": "y_no",
        "task": "classification",
        "mode": "faithful",
        "aux_n_trees": 5,
        "eval_n_trees": 5,
        "eval_k": 3,
        "out_dir": os.path.join(directory, "out"),
        "cache_dir": os.path.join(directory, "cache"),
        "threads": 1,
    }
    values.update(overrides)
    path = os.path.join(directory, "run.cfg")
    with open(path, "w", encoding="utf-8") as f:
        f.write("# toy run\n")
        for key, value in values.items():
            f.write(f"{key} = {value}\n")
    return path


def random_table(rng: np.random.Generator, n_rows: int = 30, n_attributes: int = 3,
                 target: str = "y", binary: bool = True) -> FrameTable:
    """Attributes x0..x{k-1} followed by the target; a binary target holds both classes"""
    data = rng.normal(size=(n_rows, n_attributes))
    if binary:
        labels = (data[:, 0] + 0.3 * rng.normal(size=n_rows) > 0).astype(np.float64)
        labels[0], labels[1] = 0.0, 1.0
    else:
        labels = data.sum(axis=1) + 0.1 * rng.normal(size=n_rows)
    names = [f"x{j}" for j in range(n_attributes)] + [target]
    return FrameTable(names, np.column_stack([data, labels]))


def small_augment_config(target: str = "y", mode: AugmentMode = AugmentMode.PER_CLASS,
                         n_trees: int = 4, **kwargs) -> AugmentConfig:
    return AugmentConfig(target=target, mode=mode, learner=LearnerSpec(n_trees=n_trees, seed=3), **kwargs)
