import dataclasses
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

NUMERIC = "numeric"
CATEGORICAL = "categorical"
TEXT = "text"
COLUMN_KINDS = (NUMERIC, CATEGORICAL, TEXT)


@dataclasses.dataclass(frozen=True)
class ColumnSpec:
    name: str
    kind: str = NUMERIC

    def __post_init__(self) -> None:
        if self.kind not in COLUMN_KINDS:
            raise ValueError(f"unknown column kind: {self.kind}, expected one of {COLUMN_KINDS}")


@dataclasses.dataclass(frozen=True, eq=False)
class Dataset:
    """A tabular classification dataset.

    `X` holds one column per entry in `columns`; missing and non-numeric cells are NaN. `y`
    holds integer class ids 0..m-1, `labels[i]` is the original token of class id i.

    Instances are treated as immutable: all operations return new datasets and the arrays are
    marked read-only.
    """

    name: str
    columns: Tuple[ColumnSpec, ...]
    X: np.ndarray
    y: np.ndarray
    labels: Tuple[str, ...]
    target_name: str

    def __post_init__(self) -> None:
        X = np.array(self.X, dtype=float, copy=True)
        y = np.array(self.y, dtype=int, copy=True)
        if X.ndim != 2:
            raise ValueError(f"X must be a matrix, got shape {X.shape}")
        if X.shape[1] != len(self.columns):
            raise ValueError(
                f"X has {X.shape[1]} columns but {len(self.columns)} column descriptors"
            )
        if y.shape != (X.shape[0],):
            raise ValueError(f"y must have shape ({X.shape[0]},), got {y.shape}")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "columns", tuple(self.columns))
        object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def n_instances(self) -> int:
        return self.X.shape[0]

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    @property
    def n_classes(self) -> int:
        return len(self.labels)

    @property
    def feature_names(self) -> List[str]:
        return [column.name for column in self.columns]

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.y, minlength=self.n_classes)

    def column(self, name: str) -> np.ndarray:
        return self.X[:, self.feature_names.index(name)]

    def take(self, rows: Sequence[int], name: Optional[str] = None) -> "Dataset":
        """Returns the subset of instances `rows`, keeping the label mapping."""
        rows = np.asarray(rows, dtype=int)
        return dataclasses.replace(self, name=name or self.name, X=self.X[rows], y=self.y[rows])

    def select_columns(self, indices: Sequence[int]) -> "Dataset":
        indices = list(indices)
        return dataclasses.replace(
            self,
            columns=tuple(self.columns[i] for i in indices),
            X=self.X[:, indices],
        )

    def with_columns(self, names: Sequence[str], values: np.ndarray) -> "Dataset":
        """Returns a copy with the numeric columns `names` (values: n_instances x len(names))
        appended."""
        values = np.asarray(values, dtype=float).reshape(self.n_instances, len(names))
        return dataclasses.replace(
            self,
            columns=self.columns + tuple(ColumnSpec(name) for name in names),
            X=np.hstack([self.X, values]),
        )

    def with_matrix(self, X: np.ndarray) -> "Dataset":
        """Returns a copy with the feature values replaced (same columns)."""
        return dataclasses.replace(self, X=X)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.name == other.name
            and self.columns == other.columns
            and self.labels == other.labels
            and self.target_name == other.target_name
            and np.array_equal(self.X, other.X, equal_nan=True)
            and np.array_equal(self.y, other.y)
        )

    def __hash__(self) -> int:
        return hash((self.name, self.columns, self.X.shape))


@dataclasses.dataclass(frozen=True)
class FoldPlan:
    """Stratified k-fold partition of the instances of a dataset. `folds[i]` holds the (sorted)
    test indices of fold i."""

    k: int
    folds: Tuple[np.ndarray, ...]
    seed: int

    @property
    def n_instances(self) -> int:
        return int(sum(len(fold) for fold in self.folds))

    def splits(self) -> Iterator[Tuple[np.ndarray, np.ndarray]]:
        """Yields (train indices, test indices) for each fold."""
        for i, test in enumerate(self.folds):
            train = np.sort(np.concatenate([f for j, f in enumerate(self.folds) if j != i]))
            yield train, test
