"""Seeded generators of small classification datasets with planted structure.

They make up the bundled training corpus (used instead of a large collection of public
datasets) and the fixtures of the tests.
"""

from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.dataset.types import ColumnSpec, Dataset


def _binary_labels(score: np.ndarray, threshold: float = 0.0) -> np.ndarray:
    return (score > threshold).astype(int)


def _product(rng: np.random.Generator, n: int) -> Tuple[np.ndarray, np.ndarray]:
    # the class depends on the sign of x1 * x2 only, neither parent alone is informative
    X = rng.uniform(-1.0, 1.0, size=(n, 2))
    return X, _binary_labels(X[:, 0] * X[:, 1])


def _log(rng: np.random.Generator, n: int) -> Tuple[np.ndarray, np.ndarray]:
    x = rng.uniform(0.0, np.exp(4.0), size=n)
    z = rng.uniform(0.5, 1.5, size=n)
    return np.column_stack([x, z]), _binary_labels(np.log1p(x) * z, threshold=3.0)


def _ratio(rng: np.random.Generator, n: int) -> Tuple[np.ndarray, np.ndarray]:
    X = rng.uniform(0.5, 2.0, size=(n, 2))
    return X, _binary_labels(X[:, 0] / X[:, 1], threshold=1.0)


def _square(rng: np.random.Generator, n: int) -> Tuple[np.ndarray, np.ndarray]:
    X = rng.normal(size=(n, 2))
    return X, _binary_labels(1.0 - X[:, 0] ** 2 - X[:, 1] ** 2, threshold=-0.4)


def _difference(rng: np.random.Generator, n: int) -> Tuple[np.ndarray, np.ndarray]:
    X = rng.normal(size=(n, 2))
    return X, _binary_labels(np.abs(X[:, 0] - X[:, 1]), threshold=1.0)


def _linear(rng: np.random.Generator, n: int) -> Tuple[np.ndarray, np.ndarray]:
    X = rng.normal(size=(n, 2))
    return X, _binary_labels(X[:, 0] + 0.5 * X[:, 1] + 0.3 * rng.normal(size=n))


GENERATORS: Dict[str, Callable[[np.random.Generator, int], Tuple[np.ndarray, np.ndarray]]] = {
    "product": _product,
    "log": _log,
    "ratio": _ratio,
    "square": _square,
    "difference": _difference,
    "linear": _linear,
}


def make_dataset(
    kind: str,
    n_instances: int = 300,
    seed: int = 0,
    n_noise: int = 1,
    name: Optional[str] = None,
) -> Dataset:
    """Creates a dataset whose label depends on the first two features through the planted
    relationship `kind`; `n_noise` further standard normal columns carry no information."""
    if kind not in GENERATORS:
        raise ValueError(
            f"unknown synthetic dataset kind: {kind}, expected one of {list(GENERATORS)}"
        )
    rng = np.random.default_rng(seed)
    X, y = GENERATORS[kind](rng, n_instances)
    if n_noise > 0:
        X = np.hstack([X, rng.normal(size=(n_instances, n_noise))])
    columns = tuple(ColumnSpec(f"x{i + 1}") for i in range(X.shape[1]))
    return Dataset(
        name=name or f"{kind}_{seed}",
        columns=columns,
        X=X,
        y=y,
        labels=("0", "1"),
        target_name="class",
    )


def make_corpus(
    n_datasets: int = 6,
    n_instances: int = 300,
    seed: int = 0,
    kinds: Sequence[str] = ("product", "log", "ratio", "square", "difference", "linear"),
    n_noise: int = 1,
) -> List[Dataset]:
    """The bundled training corpus: `n_datasets` datasets cycling through `kinds`."""
    return [
        make_dataset(
            kind=kinds[i % len(kinds)],
            n_instances=n_instances,
            seed=seed + i,
            n_noise=n_noise,
        )
        for i in range(n_datasets)
    ]


def simulate_linear_sem(
    weights: np.ndarray, n_instances: int, seed: int = 0, noise_scale: float = 1.0
) -> np.ndarray:
    """Samples X = X W + E for a weighted DAG `weights` (W[a, b] is the effect of node a on
    node b) whose nodes are given in topological order."""
    weights = np.asarray(weights, dtype=float)
    if not np.allclose(weights, np.triu(weights, k=1)):
        raise ValueError("weights must be strictly upper triangular (nodes in topological order)")
    rng = np.random.default_rng(seed)
    d = weights.shape[0]
    X = np.zeros((n_instances, d))
    for j in range(d):
        X[:, j] = X @ weights[:, j] + noise_scale * rng.normal(size=n_instances)
    return X


def make_sem_dataset(
    weights: np.ndarray,
    n_instances: int = 500,
    seed: int = 0,
    n_classes: int = 4,
    noise_scale: float = 1.0,
    name: str = "sem",
) -> Dataset:
    """Samples a linear SEM whose last node is the target, discretized into `n_classes`
    quantile bins (class ids keep the order of the continuous value)."""
    Z = simulate_linear_sem(weights, n_instances, seed=seed, noise_scale=noise_scale)
    target = Z[:, -1]
    edges = np.quantile(target, np.linspace(0.0, 1.0, n_classes + 1)[1:-1])
    y = np.searchsorted(edges, target, side="right")
    features = Z[:, :-1]
    return Dataset(
        name=name,
        columns=tuple(ColumnSpec(f"x{i + 1}") for i in range(features.shape[1])),
        X=features,
        y=y,
        labels=tuple(str(c) for c in range(n_classes)),
        target_name="class",
    )
