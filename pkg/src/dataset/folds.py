import numpy as np
from sklearn.model_selection import StratifiedKFold

from src.dataset.types import Dataset, FoldPlan
from src.errors import BadThreshold, ClassTooSmall


def stratified_folds(dataset: Dataset, k: int, seed: int) -> FoldPlan:
    """Partitions the instances into `k` stratified folds.

    Per class, the fold sizes differ by at most one instance. The partition only depends on
    (labels, k, seed).
    """
    if k < 2:
        raise BadThreshold(f"k must be at least 2, got {k}")
    counts = dataset.class_counts()
    too_small = [dataset.labels[c] for c, count in enumerate(counts) if count < k]
    if too_small:
        raise ClassTooSmall(
            f"classes {too_small} of {dataset.name} have fewer than k={k} instances"
        )
    splitter = StratifiedKFold(n_splits=k, shuffle=True, random_state=seed)
    placeholder = np.zeros((dataset.n_instances, 1))
    folds = tuple(np.sort(test) for _, test in splitter.split(placeholder, dataset.y))
    return FoldPlan(k=k, folds=folds, seed=seed)
