import numpy as np
import pytest

from src.dataset import ColumnSpec, Dataset
from src.errors import BadThreshold
from src.scaling import (
    MINMAX,
    ROBUST,
    STANDARD,
    ScalerDecision,
    decide,
    outlier_proportion,
    recommend_scaler,
)
from src.transforms import SCALER, TransformId


def make(X) -> Dataset:
    X = np.asarray(X, dtype=float)
    return Dataset(
        name="d",
        columns=tuple(ColumnSpec(f"x{j}") for j in range(X.shape[1])),
        X=X,
        y=np.arange(X.shape[0]) % 2,
        labels=("0", "1"),
        target_name="class",
    )


def test_outlier_proportion():
    assert outlier_proportion(np.array([1.0, 2.0, 3.0, 4.0, 100.0])) == pytest.approx(0.2)
    assert outlier_proportion(np.arange(10.0)) == 0.0
    X = np.column_stack([np.arange(10.0), np.r_[np.arange(9.0), 1000.0]])
    assert outlier_proportion(X) == pytest.approx(1 / 20)
    with pytest.raises(ValueError):
        outlier_proportion(np.zeros((0, 2)))


def test_decide():
    assert decide(0.2, None, 0.05) == ROBUST
    assert decide(0.01, 0.3, 0.05) == STANDARD
    assert decide(0.01, 0.01, 0.05) == MINMAX
    # the outlier threshold is strict
    assert decide(0.05, 0.3, 0.05) == STANDARD


def _with_outliers(rng, n=500, d=3, fraction=0.2):
    X = rng.normal(size=(n, d))
    mask = rng.uniform(size=X.shape) < fraction
    X[mask] = rng.choice([-50.0, 50.0], size=mask.sum())
    return X


@pytest.mark.parametrize(
    "sample, expected",
    [
        (_with_outliers, ROBUST),
        (lambda rng: rng.normal(size=(200, 3)), STANDARD),
        (lambda rng: rng.uniform(size=(500, 3)), MINMAX),
    ],
)
def test_recommend_scaler_regimes(sample, expected):
    choices = [
        recommend_scaler(make(sample(np.random.default_rng(seed)))).choice for seed in range(10)
    ]
    assert choices.count(expected) >= 9


def test_recommend_scaler_decision_fields():
    outliers = recommend_scaler(make(_with_outliers(np.random.default_rng(0))))
    assert outliers.sw_p is None
    assert outliers.outlier_fraction > 0.05
    normal = recommend_scaler(make(np.random.default_rng(0).normal(size=(200, 3))))
    assert normal.sw_p is not None and 0.0 <= normal.sw_p <= 1.0
    assert normal.transform == TransformId(SCALER, normal.choice)


def test_recommend_scaler_constant_columns_are_not_normal():
    X = np.column_stack([np.ones(50), np.full(50, 2.0)])
    expected = ScalerDecision(choice=MINMAX, outlier_fraction=0.0, sw_p=0.0)
    assert recommend_scaler(make(X)) == expected


def test_recommend_scaler_bad_gamma():
    with pytest.raises(BadThreshold):
        recommend_scaler(make(np.zeros((5, 1))), gamma=1.5)
