"""
Custom exceptions for residual augmentation runs
"""


class ResidualAugmentError(Exception):
    """Base exception for residual augmentation"""
    exit_code = 1
    stage = "run"


class ConfigError(ResidualAugmentError):
    """Invalid configuration value or config file syntax"""
    exit_code = 2
    stage = "config"


class IngestError(ResidualAugmentError):
    """Dataset acquisition or preprocessing error"""
    exit_code = 3
    stage = "ingest"


class FetchError(IngestError):
    """Dataset could not be downloaded and no cached copy exists"""
    pass


class FormatError(IngestError):
    """Archive or CSV does not have the expected structure"""
    pass


class ParseError(IngestError):
    """CSV line could not be parsed"""
    pass


class ValidationError(ResidualAugmentError):
    """Input does not match the expected schema, length or value range"""
    exit_code = 4
    stage = "validation"


class LearnerError(ResidualAugmentError):
    """Tree or forest training error"""
    exit_code = 4
    stage = "learner"


class DegenerateInputError(LearnerError):
    """Too few rows to perform the requested operation"""
    pass


class EvalError(ResidualAugmentError):
    """Cross-validated evaluation error"""
    exit_code = 5
    stage = "eval"


class AugmentError(ResidualAugmentError):
    """Attribute model bank or residual generation error"""
    exit_code = 6
    stage = "augment"


class DegeneratePartitionError(AugmentError):
    """A target class has no rows, so its bank cannot be trained"""
    pass


class StoreError(ResidualAugmentError):
    """Artifact catalog error"""
    exit_code = 7
    stage = "store"
