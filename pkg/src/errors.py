"""Exception hierarchy shared by all components.

Library code raises these; only the command line layer (see `src.cli`) maps them to exit codes.
"""

from typing import Any, Optional


class FeatureCraftError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(FeatureCraftError):
    """Invalid configuration values or incompatible artifacts."""


class DataError(FeatureCraftError):
    """Problems with input data (files, columns, labels)."""


class ComputationError(FeatureCraftError):
    """Numerical procedures that could not produce a valid result."""


# =============================== data errors ============================== #


class MissingTarget(DataError):
    pass


class ParseError(DataError):
    def __init__(self, message: str, row: Optional[int] = None):
        super().__init__(message if row is None else f"{message} (row {row})")
        self.row = row


class TooFewClasses(DataError):
    pass


class RegressionTarget(DataError):
    pass


class NoNumericFeatures(DataError):
    pass


class ClassTooSmall(DataError):
    pass


class EmptyFeature(DataError):
    pass


class EmptyCorpus(DataError):
    pass


class LengthMismatch(DataError):
    pass


class TooFewSamples(DataError):
    pass


class DegenerateSample(DataError):
    pass


class CorruptFile(DataError):
    pass


class IoError(DataError):
    pass


# ============================== config errors ============================= #


class BadThreshold(ConfigError):
    pass


class UnknownTransform(ConfigError):
    pass


class ConfigMismatch(ConfigError):
    pass


class VersionMismatch(ConfigError):
    pass


class UnknownClassifier(ConfigError):
    pass


# ============================ computation errors ========================== #


class TooLarge(ComputationError):
    pass


class NonSquare(ComputationError):
    pass


class NonFiniteTransformOutput(ComputationError):
    pass


class EmptyTrm(ComputationError):
    pass


class NonConvergence(ComputationError):
    """The acyclicity constraint stayed above tolerance. `last_iterate` holds the final W."""

    def __init__(self, message: str, last_iterate: Any = None, h: float = float("nan")):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.h = h


class CapExceededWarning(UserWarning):
    """More features were recommended than the growth cap allows."""
