"""
residual-augment-py: dataset augmentation with weighted residual features
"""

from .ingest import (RawTable, FrameTable, StageCounts, fetch_dataset, load_csv, sample_rows,
                     drop_duplicates, drop_missing, one_hot_encode, standardize, binarize_target,
                     drop_columns, preprocess)
from .learner import (DecisionTree, RandomForest, ModelFitness, train_test_split, fit_tree, fit_forest,
                      predict, r_squared)
from .augment import (AttributeModelBank, RoundSummary, partition_by_target, train_attribute_models, weigh_residuals,
                      residual_features, augment_dataset, iterate_rounds, split_residual_name,
                      save_banks, load_banks)
from .evaluation import (MetricsBundle, ComparisonReport, kfold_predict, classification_metrics,
                         regression_metrics, compare)
from .repository import ArtifactStore, BaseRepository, BankCacheRepository, ReportRepository
from .config import (TaskType, AugmentMode, Weighting, ResidualSource, RegressionTarget, LearnerSpec,
                     AugmentConfig, EvalConfig, RunConfig, StoreLocation, StoreConfig)
from .exceptions import (ResidualAugmentError, ConfigError, IngestError, FetchError, FormatError,
                         ParseError, ValidationError, LearnerError, DegenerateInputError, EvalError,
                         AugmentError, DegeneratePartitionError, StoreError)
from .utils import ConfigLoader

__all__ = [
    # Ingestion
    'RawTable',
    'FrameTable',
    'StageCounts',
    'fetch_dataset',
    'load_csv',
    'sample_rows',
    'drop_duplicates',
    'drop_missing',
    'one_hot_encode',
    'standardize',
    'binarize_target',
    'drop_columns',
    'preprocess',

    # Learner
    'DecisionTree',
    'RandomForest',
    'ModelFitness',
    'train_test_split',
    'fit_tree',
    'fit_forest',
    'predict',
    'r_squared',

    # Augmentation
    'AttributeModelBank',
    'RoundSummary',
    'partition_by_target',
    'train_attribute_models',
    'weigh_residuals',
    'residual_features',
    'augment_dataset',
    'iterate_rounds',
    'split_residual_name',
    'save_banks',
    'load_banks',

    # Evaluation
    'MetricsBundle',
    'ComparisonReport',
    'kfold_predict',
    'classification_metrics',
    'regression_metrics',
    'compare',

    # Catalog
    'ArtifactStore',
    'BaseRepository',
    'BankCacheRepository',
    'ReportRepository',

    # Configuration
    'TaskType',
    'AugmentMode',
    'Weighting',
    'ResidualSource',
    'RegressionTarget',
    'LearnerSpec',
    'AugmentConfig',
    'EvalConfig',
    'RunConfig',
    'StoreLocation',
    'StoreConfig',
    'ConfigLoader',

    # Exceptions
    'ResidualAugmentError',
    'ConfigError',
    'IngestError',
    'FetchError',
    'FormatError',
    'ParseError',
    'ValidationError',
    'LearnerError',
    'DegenerateInputError',
    'EvalError',
    'AugmentError',
    'DegeneratePartitionError',
    'StoreError',
]

__version__ = '0.1.0'
