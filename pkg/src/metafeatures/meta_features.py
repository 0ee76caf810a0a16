import dataclasses
import math
from typing import List, Optional, Tuple

import numpy as np
import scipy.stats
from sklearn.metrics import mutual_info_score

from src.dataset import Dataset
from src.errors import BadThreshold, EmptyFeature

META_FEATURE_NAMES: Tuple[str, ...] = (
    "log10_n_instances",
    "log10_n_features",
    "n_classes",
    "features_per_instance",
    "mean_of_means",
    "mean_of_stds",
    "mean_skewness",
    "mean_excess_kurtosis",
    "mean_abs_correlation",
    "normalized_class_entropy",
    "mean_normalized_feature_entropy",
    "mean_normalized_mutual_information",
    "majority_class_proportion",
)

# fixed resolution of the information-theoretic meta-features (independent of the encoding bins)
META_FEATURE_BINS = 10


@dataclasses.dataclass(frozen=True)
class EncodingConfig:
    """Configuration of the feature encodings.

    Args:
        bins: number of histogram bins appended to the meta-feature vector.
    """

    bins: int = 10

    def __post_init__(self) -> None:
        if self.bins < 2:
            raise BadThreshold(f"bins must be at least 2, got {self.bins}")

    @property
    def n_meta_features(self) -> int:
        return len(META_FEATURE_NAMES)

    @property
    def encoding_length(self) -> int:
        return self.n_meta_features + self.bins


def _bin_indices(x: np.ndarray, s: int) -> np.ndarray:
    """Bin id in 0..s-1 for every value, uniform widths over [min x, max x], final bin closed on
    the right. Assumes max x > min x."""
    lo, hi = float(np.min(x)), float(np.max(x))
    # halved operands keep hi - lo finite for values close to the float limits
    fraction = (x / 2.0 - lo / 2.0) / (hi / 2.0 - lo / 2.0)
    idx = np.floor(fraction * s).astype(int)
    return np.clip(idx, 0, s - 1)


def feature_histogram(x: np.ndarray, s: int) -> np.ndarray:
    """Normalized histogram of `x` with `s` uniform-width bins over [min x, max x].

    Entries are bin counts divided by the number of values, so they sum to one. A constant
    feature yields the all-zero vector.

    >>> feature_histogram(np.array([0.0, 0.5, 1.0, 1.5]), 2).tolist()
    [0.5, 0.5]
    """
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        raise EmptyFeature("can not compute the histogram of an empty feature")
    if s < 2:
        raise ValueError(f"histogram needs at least 2 bins, got {s}")
    if np.max(x) == np.min(x):
        return np.zeros(s)
    counts = np.bincount(_bin_indices(x, s), minlength=s)
    return counts / x.size


def _entropy(counts: np.ndarray) -> float:
    counts = counts[counts > 0]
    if counts.size == 0:
        return 0.0
    return float(scipy.stats.entropy(counts))


def _column_moments(column: np.ndarray) -> Tuple[float, float, float, float]:
    # sorted values make the statistics independent of the instance order
    values = np.sort(column)
    with np.errstate(over="ignore", invalid="ignore"):
        mean = float(np.sum(values) / values.size)
        if values[0] == values[-1]:
            return mean, 0.0, 0.0, 0.0
        std = float(np.sqrt(np.sum((values - mean) ** 2) / values.size))
        skewness = float(scipy.stats.skew(values))
        kurtosis = float(scipy.stats.kurtosis(values))
    return (
        mean,
        std,
        skewness if np.isfinite(skewness) else 0.0,
        kurtosis if np.isfinite(kurtosis) else 0.0,
    )


def _mean(values: List[float]) -> float:
    if not values:
        return 0.0
    try:
        return math.fsum(values) / len(values)
    except (OverflowError, ValueError):
        # mapped to 0 together with the other non-finite statistics
        return float("nan")


def _mean_abs_correlation(X: np.ndarray, y: np.ndarray) -> float:
    n_features = X.shape[1]
    if n_features < 2:
        return 0.0
    # canonical row order: the result does not depend on the order of the instances
    order = np.lexsort(np.vstack([X.T[::-1], y[None, :]]))
    X = X[order]
    centered = X - X.mean(axis=0)
    norms = np.sqrt((centered**2).sum(axis=0))
    correlations = []
    for i in range(n_features):
        for j in range(i + 1, n_features):
            if norms[i] == 0.0 or norms[j] == 0.0:
                correlations.append(0.0)
                continue
            r = float(centered[:, i] @ centered[:, j] / (norms[i] * norms[j]))
            correlations.append(min(abs(r), 1.0))
    return _mean(correlations)


def extract_meta_features(dataset: Dataset) -> np.ndarray:
    """Computes the meta-feature vector of a (preprocessed) dataset, entries ordered as in
    `META_FEATURE_NAMES`.

    Degenerate statistics are mapped to 0: skewness, kurtosis and correlations that involve a
    constant feature, the mean correlation of a single-feature dataset and the entropies of
    constant features.
    """
    X, y = dataset.X, dataset.y
    n, f, m = dataset.n_instances, dataset.n_features, dataset.n_classes

    moments = [_column_moments(X[:, j]) for j in range(f)]
    class_counts = dataset.class_counts()
    class_entropy = _entropy(class_counts)

    feature_entropies = []
    mutual_information = []
    for j in range(f):
        column = X[:, j]
        if np.max(column) == np.min(column):
            feature_entropies.append(0.0)
            mutual_information.append(0.0)
            continue
        binned = _bin_indices(column, META_FEATURE_BINS)
        histogram = np.bincount(binned, minlength=META_FEATURE_BINS)
        feature_entropies.append(_entropy(histogram) / math.log(META_FEATURE_BINS))
        mi = float(mutual_info_score(binned, y))
        mutual_information.append(mi / class_entropy if class_entropy > 0 else 0.0)

    values = np.array(
        [
            math.log10(n),
            math.log10(f),
            float(m),
            f / n,
            _mean([mom[0] for mom in moments]),
            _mean([mom[1] for mom in moments]),
            _mean([mom[2] for mom in moments]),
            _mean([mom[3] for mom in moments]),
            _mean_abs_correlation(X, y),
            class_entropy / math.log(m) if m > 1 else 0.0,
            _mean(feature_entropies),
            _mean(mutual_information),
            float(class_counts.max()) / n,
        ]
    )
    return np.nan_to_num(values, nan=0.0, posinf=0.0, neginf=0.0)


def encode_feature(
    dataset: Dataset,
    j: int,
    config: EncodingConfig = EncodingConfig(),
    meta_features: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Encoding of feature `j`: the meta-feature vector of the dataset followed by the normalized
    histogram of the feature. Pass `meta_features` to reuse an already computed vector."""
    if not 0 <= j < dataset.n_features:
        raise IndexError(f"feature index {j} out of range for {dataset.n_features} features")
    if meta_features is None:
        meta_features = extract_meta_features(dataset)
    return np.concatenate([meta_features, feature_histogram(dataset.X[:, j], config.bins)])


def encode_features(
    dataset: Dataset,
    config: EncodingConfig = EncodingConfig(),
    meta_features: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Encodings of all features (one row per feature)."""
    if meta_features is None:
        meta_features = extract_meta_features(dataset)
    return np.vstack(
        [
            encode_feature(dataset, j, config=config, meta_features=meta_features)
            for j in range(dataset.n_features)
        ]
    )


def encode_dataset(dataset: Dataset) -> np.ndarray:
    """Dataset level encoding, i.e. the meta-feature vector alone."""
    return extract_meta_features(dataset)
