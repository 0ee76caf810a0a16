import os
import re
from typing import Dict, List, Mapping, Optional, Union

import numpy as np
import pandas as pd

from src.dataset.types import CATEGORICAL, NUMERIC, TEXT, ColumnSpec, Dataset
from src.errors import (
    EmptyCorpus,
    IoError,
    MissingTarget,
    ParseError,
    RegressionTarget,
    TooFewClasses,
)
from src.utils.logging_utils import get_pylogger
from src.utils.task_utils import read_key_value_file

log = get_pylogger(__name__)

# a column is numeric iff at least this fraction of its non-empty cells parse as finite reals
NUMERIC_FRACTION = 0.99
# non-numeric columns with at most this many distinct values are categorical, else text
MAX_CATEGORIES = 20


def _parse_numeric(values: pd.Series) -> pd.Series:
    parsed = pd.to_numeric(values.str.strip(), errors="coerce")
    return parsed.where(np.isfinite(parsed))


def infer_column_kind(values: pd.Series) -> str:
    """Infers the kind of a raw (string) column. Empty strings are missing values."""
    non_empty = values[values.str.strip() != ""]
    if len(non_empty) == 0:
        return NUMERIC
    parsed = _parse_numeric(non_empty)
    if parsed.notna().mean() >= NUMERIC_FRACTION:
        return NUMERIC
    return CATEGORICAL if non_empty.nunique() <= MAX_CATEGORIES else TEXT


def _is_continuous_target(labels: pd.Series) -> bool:
    parsed = _parse_numeric(labels)
    if parsed.isna().any():
        return False
    return bool((parsed != np.round(parsed)).any())


def _row_of_parser_error(message: str) -> Optional[int]:
    match = re.search(r"line (\d+)", message)
    return int(match.group(1)) if match else None


def load_csv(path: str, target: str, name: Optional[str] = None) -> Dataset:
    """Loads a classification dataset from a CSV file with header row.

    Empty cells are missing values. Cells of numeric columns that can not be parsed become
    missing values as well. Non-numeric columns are kept as (all-missing) descriptors marked
    `categorical` or `text` and removed by `preprocess`.
    """
    if not os.path.exists(path):
        raise IoError(f"file not found: {path}")
    try:
        frame = pd.read_csv(
            path,
            dtype=str,
            keep_default_na=False,
            na_filter=False,
            encoding="utf-8",
            skipinitialspace=False,
        )
    except pd.errors.EmptyDataError as ex:
        raise ParseError(f"no header row in {path}") from ex
    except pd.errors.ParserError as ex:
        raise ParseError(f"unreadable row in {path}: {ex}", row=_row_of_parser_error(str(ex)))
    except UnicodeDecodeError as ex:
        raise ParseError(f"{path} is not valid UTF-8") from ex

    if target not in frame.columns:
        raise MissingTarget(f"target column '{target}' not found in {path}")

    raw_labels = frame[target].str.strip()
    empty = np.flatnonzero((raw_labels == "").to_numpy())
    if len(empty) > 0:
        # +2: header row and 1-based numbering
        raise ParseError(f"missing class label in {path}", row=int(empty[0]) + 2)
    if _is_continuous_target(raw_labels):
        raise RegressionTarget(
            f"target column '{target}' in {path} is continuous, only classification is supported"
        )
    codes, uniques = pd.factorize(raw_labels, sort=False)
    if len(uniques) < 2:
        raise TooFewClasses(f"target column '{target}' in {path} has {len(uniques)} class(es)")

    columns: List[ColumnSpec] = []
    values: List[np.ndarray] = []
    for column_name in frame.columns:
        if column_name == target:
            continue
        raw = frame[column_name]
        kind = infer_column_kind(raw)
        columns.append(ColumnSpec(name=str(column_name), kind=kind))
        if kind == NUMERIC:
            values.append(_parse_numeric(raw).to_numpy(dtype=float))
        else:
            values.append(np.full(len(frame), np.nan))

    X = np.column_stack(values) if values else np.empty((len(frame), 0))
    dataset = Dataset(
        name=name or os.path.splitext(os.path.basename(path))[0],
        columns=tuple(columns),
        X=X,
        y=codes,
        labels=tuple(str(label) for label in uniques),
        target_name=target,
    )
    log.info(
        f"Loaded dataset <{dataset.name}> from {path}: {dataset.n_instances} instances, "
        f"{dataset.n_features} columns, {dataset.n_classes} classes"
    )
    return dataset


def save_csv(dataset: Dataset, path: str) -> str:
    """Writes the features (full precision) followed by the target column with the original
    label tokens."""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    frame = pd.DataFrame(dataset.X, columns=dataset.feature_names)
    frame[dataset.target_name] = [dataset.labels[c] for c in dataset.y]
    frame.to_csv(path, index=False, float_format="%.17g", lineterminator="\n")
    log.info(f"Saved dataset <{dataset.name}> to {path}")
    return path


def parse_target_map(target_map: Union[str, Mapping[str, str], None]) -> Dict[str, str]:
    """A target map is either a mapping file name -> target column, a path to a key=value file
    with such entries, or a single column name that is used for every file (key `*`)."""
    if target_map is None:
        return {}
    if isinstance(target_map, Mapping):
        return {str(k): str(v) for k, v in target_map.items()}
    if os.path.isfile(target_map):
        return read_key_value_file(target_map)
    return {"*": str(target_map)}


def load_corpus(
    data_dir: str, target_map: Union[str, Mapping[str, str], None] = None
) -> List[Dataset]:
    """Loads every CSV file in `data_dir` (sorted by file name)."""
    if not os.path.isdir(data_dir):
        raise IoError(f"data directory not found: {data_dir}")
    targets = parse_target_map(target_map)
    file_names = sorted(f for f in os.listdir(data_dir) if f.lower().endswith(".csv"))
    if not file_names:
        raise EmptyCorpus(f"no CSV files found in {data_dir}")
    datasets = []
    for file_name in file_names:
        stem = os.path.splitext(file_name)[0]
        target = targets.get(file_name, targets.get(stem, targets.get("*")))
        if target is None:
            raise MissingTarget(f"no target column given for {file_name} in the target map")
        datasets.append(load_csv(os.path.join(data_dir, file_name), target=target, name=stem))
    return datasets
