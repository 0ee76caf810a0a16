"""Closed sets of unary, binary and scaling transformations.

Unary and binary transformations are total: finite inputs always give finite outputs.
"""

import dataclasses
from typing import Callable, Dict, Optional, Tuple

import numpy as np
from scipy.special import expit
from sklearn.preprocessing import MinMaxScaler, RobustScaler, StandardScaler

from src.errors import LengthMismatch, UnknownTransform

# bump when the semantics of a transformation change, trm files record it
REGISTRY_VERSION = "1"

EPSILON = 1e-8
FLOAT_MAX = np.finfo(float).max

UNARY = "unary"
BINARY = "binary"
SCALER = "scaler"
KINDS = (UNARY, BINARY, SCALER)


def _finite(values: np.ndarray) -> np.ndarray:
    return np.nan_to_num(values, nan=0.0, posinf=FLOAT_MAX, neginf=-FLOAT_MAX)


def safe_log(x: np.ndarray) -> np.ndarray:
    return np.sign(x) * np.log1p(np.abs(x))


def safe_sqrt(x: np.ndarray) -> np.ndarray:
    return np.sqrt(np.abs(x))


def safe_square(x: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        return _finite(x * x)


def safe_cube(x: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        return _finite(x * x * x)


def safe_reciprocal(x: np.ndarray) -> np.ndarray:
    """x / (x^2 + eps^2), rewritten as 1 / (x + eps^2 / x) for |x| > 1 where x^2 may overflow."""
    large = np.abs(x) > 1.0
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        result = np.where(large, 1.0 / (x + EPSILON**2 / x), x / (x * x + EPSILON**2))
    return _finite(result)


def safe_sigmoid(x: np.ndarray) -> np.ndarray:
    return expit(x)


def add(x1: np.ndarray, x2: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        return _finite(x1 + x2)


def subtract(x1: np.ndarray, x2: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        return _finite(x1 - x2)


def multiply(x1: np.ndarray, x2: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        return _finite(x1 * x2)


def divide(x1: np.ndarray, x2: np.ndarray) -> np.ndarray:
    """x1 * x2 / (x2^2 + eps^2), zero where x2 is zero."""
    with np.errstate(over="ignore", invalid="ignore"):
        return _finite(x1 * safe_reciprocal(x2))


UNARY_TRANSFORMS: Dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "log": safe_log,
    "sqrt": safe_sqrt,
    "square": safe_square,
    "cube": safe_cube,
    "reciprocal": safe_reciprocal,
    "sigmoid": safe_sigmoid,
    "tanh": np.tanh,
}

BINARY_TRANSFORMS: Dict[str, Callable[[np.ndarray, np.ndarray], np.ndarray]] = {
    "add": add,
    "subtract": subtract,
    "mult": multiply,
    "divide": divide,
}
COMMUTATIVE = frozenset({"add", "mult"})

SCALERS: Dict[str, Callable[[], object]] = {
    "minmax": MinMaxScaler,
    "standard": StandardScaler,
    # quantiles with linear interpolation between order statistics
    "robust": lambda: RobustScaler(quantile_range=(25.0, 75.0)),
}

ALIASES = {"multiply": "mult", "sub": "subtract", "div": "divide", "mul": "mult"}

_REGISTRIES = {UNARY: UNARY_TRANSFORMS, BINARY: BINARY_TRANSFORMS, SCALER: SCALERS}


@dataclasses.dataclass(frozen=True)
class TransformId:
    """Reference to a registry entry, serialized as `kind:name`."""

    kind: str
    name: str

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise UnknownTransform(f"unknown transform kind: {self.kind}")
        name = ALIASES.get(self.name, self.name)
        if name not in _REGISTRIES[self.kind]:
            raise UnknownTransform(
                f"unknown {self.kind} transform: {self.name}, "
                f"expected one of {sorted(_REGISTRIES[self.kind])}"
            )
        object.__setattr__(self, "name", name)

    def __str__(self) -> str:
        return f"{self.kind}:{self.name}"

    @classmethod
    def parse(cls, token: str) -> "TransformId":
        kind, sep, name = token.partition(":")
        if not sep:
            raise UnknownTransform(f"transform token must look like kind:name, got '{token}'")
        return cls(kind=kind, name=name)

    @property
    def is_commutative(self) -> bool:
        return self.kind == BINARY and self.name in COMMUTATIVE


def unary_ids() -> Tuple[TransformId, ...]:
    return tuple(TransformId(UNARY, name) for name in UNARY_TRANSFORMS)


def binary_ids() -> Tuple[TransformId, ...]:
    return tuple(TransformId(BINARY, name) for name in BINARY_TRANSFORMS)


def scaler_ids() -> Tuple[TransformId, ...]:
    return tuple(TransformId(SCALER, name) for name in SCALERS)


def _expect_kind(transform: TransformId, kind: str) -> None:
    if transform.kind != kind:
        raise UnknownTransform(f"{transform} is not a {kind} transform")


def apply_unary(transform: TransformId, x: np.ndarray) -> np.ndarray:
    """
    >>> apply_unary(TransformId("unary", "square"), np.array([1.0, -2.0, 3.0])).tolist()
    [1.0, 4.0, 9.0]
    """
    _expect_kind(transform, UNARY)
    return UNARY_TRANSFORMS[transform.name](np.asarray(x, dtype=float))


def apply_binary(transform: TransformId, x1: np.ndarray, x2: np.ndarray) -> np.ndarray:
    _expect_kind(transform, BINARY)
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    if x1.shape != x2.shape:
        raise LengthMismatch(f"binary transform inputs differ in shape: {x1.shape} vs {x2.shape}")
    return BINARY_TRANSFORMS[transform.name](x1, x2)


@dataclasses.dataclass(frozen=True, eq=False)
class FittedScaler:
    """A scaler fitted on some data. Columns that were constant during fitting are mapped to 0."""

    transform: TransformId
    scaler: object
    constant_columns: np.ndarray

    def transform_matrix(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.shape[1] != self.constant_columns.size:
            raise LengthMismatch(
                f"scaler was fitted on {self.constant_columns.size} columns, got {X.shape[1]}"
            )
        scaled = np.array(self.scaler.transform(X), dtype=float)
        scaled[:, self.constant_columns] = 0.0
        return scaled


def apply_scaler(
    transform: TransformId, X: np.ndarray, fitted: Optional[FittedScaler] = None
) -> Tuple[np.ndarray, FittedScaler]:
    """Scales every column of `X`. The scaler is fitted on `X` unless an already `fitted` one
    is given (train/test discipline). Returns the scaled matrix and the fitted scaler.

    >>> scaled, _ = apply_scaler(TransformId("scaler", "minmax"), np.array([[2.0], [4.0], [6.0]]))
    >>> scaled.ravel().tolist()
    [0.0, 0.5, 1.0]
    """
    _expect_kind(transform, SCALER)
    X = np.asarray(X, dtype=float)
    if fitted is None:
        fitted = FittedScaler(
            transform=transform,
            scaler=SCALERS[transform.name]().fit(X),
            constant_columns=np.ptp(X, axis=0) == 0.0,
        )
    elif fitted.transform != transform:
        raise UnknownTransform(f"fitted scaler is {fitted.transform}, not {transform}")
    return fitted.transform_matrix(X), fitted
