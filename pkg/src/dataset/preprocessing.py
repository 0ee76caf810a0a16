import dataclasses
from typing import Tuple

import numpy as np

from src.dataset.types import NUMERIC, Dataset
from src.errors import LengthMismatch, NoNumericFeatures
from src.utils.logging_utils import get_pylogger

log = get_pylogger(__name__)


@dataclasses.dataclass(frozen=True, eq=False)
class FittedPreprocessing:
    """Column selection and imputation means learned on one set of instances (e.g. a training
    fold), replayable on others with the same columns."""

    source_names: Tuple[str, ...]
    keep: Tuple[int, ...]
    means: np.ndarray

    @property
    def kept_names(self) -> Tuple[str, ...]:
        return tuple(self.source_names[i] for i in self.keep)

    def apply(self, dataset: Dataset) -> Dataset:
        if tuple(dataset.feature_names) != self.source_names:
            raise LengthMismatch(
                f"dataset {dataset.name} has the columns {dataset.feature_names}, the "
                f"preprocessing was fitted on {list(self.source_names)}"
            )
        selected = dataset.select_columns(self.keep)
        X = np.array(selected.X, copy=True)
        missing = np.isnan(X)
        if missing.any():
            rows, cols = np.nonzero(missing)
            X[rows, cols] = self.means[cols]
            log.info(f"Imputed {int(missing.sum())} missing values of <{dataset.name}>")
        return selected.with_matrix(X)


def fit_preprocessing(dataset: Dataset) -> FittedPreprocessing:
    """Learns which columns to keep (numeric with at least one observed value) and the mean of
    the observed values of each kept column."""
    keep = []
    for idx, column in enumerate(dataset.columns):
        if column.kind != NUMERIC:
            log.debug(f"drop non-numeric column <{column.name}> ({column.kind})")
            continue
        if np.isnan(dataset.X[:, idx]).all():
            log.debug(f"drop all-missing column <{column.name}>")
            continue
        keep.append(idx)

    if not keep:
        raise NoNumericFeatures(f"dataset {dataset.name} has no numeric feature columns")

    dropped = dataset.n_features - len(keep)
    if dropped > 0:
        log.info(f"Dropped {dropped} of {dataset.n_features} columns of <{dataset.name}>")

    means = np.nanmean(dataset.X[:, keep], axis=0)
    means.setflags(write=False)
    return FittedPreprocessing(
        source_names=tuple(dataset.feature_names), keep=tuple(keep), means=means
    )


def preprocess(dataset: Dataset) -> Dataset:
    """Removes non-numerical columns and columns without any observed value, and imputes the
    remaining missing values with the mean of the observed values of their column.

    Constant columns are kept. The operation is idempotent.
    """
    return fit_preprocessing(dataset).apply(dataset)
