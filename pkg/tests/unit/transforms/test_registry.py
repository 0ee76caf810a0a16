import itertools
import math

import numpy as np
import pytest

from src.errors import LengthMismatch, UnknownTransform
from src.transforms import (
    BINARY,
    SCALER,
    UNARY,
    TransformId,
    apply_binary,
    apply_scaler,
    apply_unary,
    binary_ids,
    scaler_ids,
    unary_ids,
)

ADVERSARIAL = np.array([0.0, 1e300, -1e300, 1e-300, -1e-300, 1.0, -1.0, 0.5])


def test_registry_sizes():
    assert len(unary_ids()) == 7
    assert len(binary_ids()) == 4
    assert len(scaler_ids()) == 3


def test_transform_id():
    transform = TransformId.parse("binary:multiply")
    assert transform == TransformId(BINARY, "mult")
    assert str(transform) == "binary:mult"
    assert transform.is_commutative
    assert not TransformId(BINARY, "divide").is_commutative
    with pytest.raises(UnknownTransform):
        TransformId(UNARY, "exp")
    with pytest.raises(UnknownTransform):
        TransformId("ternary", "add")
    with pytest.raises(UnknownTransform):
        TransformId.parse("square")


def test_apply_unary_examples():
    np.testing.assert_array_equal(
        apply_unary(TransformId(UNARY, "square"), np.array([1.0, -2.0, 3.0])), [1.0, 4.0, 9.0]
    )
    np.testing.assert_array_equal(apply_unary(TransformId(UNARY, "log"), np.array([0.0])), [0.0])
    np.testing.assert_array_equal(
        apply_unary(TransformId(UNARY, "reciprocal"), np.array([0.0])), [0.0]
    )
    np.testing.assert_allclose(
        apply_unary(TransformId(UNARY, "log"), np.array([-(math.e - 1.0), math.e - 1.0])),
        [-1.0, 1.0],
    )
    np.testing.assert_array_equal(apply_unary(TransformId(UNARY, "sqrt"), np.array([-4.0])), [2.0])


def test_apply_unary_wrong_kind():
    with pytest.raises(UnknownTransform):
        apply_unary(TransformId(BINARY, "add"), np.zeros(3))


def test_apply_binary_examples():
    mult = TransformId(BINARY, "mult")
    np.testing.assert_array_equal(apply_binary(mult, np.array([2.0, 3.0]), np.array([4.0, 5.0])), [8.0, 15.0])
    np.testing.assert_array_equal(
        apply_binary(TransformId(BINARY, "divide"), np.array([1.0]), np.array([0.0])), [0.0]
    )
    x = np.random.default_rng(0).normal(size=10)
    np.testing.assert_array_equal(apply_binary(TransformId(BINARY, "subtract"), x, x), np.zeros(10))


def test_apply_binary_length_mismatch():
    with pytest.raises(LengthMismatch):
        apply_binary(TransformId(BINARY, "add"), np.zeros(3), np.zeros(4))


def test_commutativity():
    rng = np.random.default_rng(1)
    x1, x2 = rng.normal(size=20), rng.normal(size=20)
    for name in ["add", "mult"]:
        transform = TransformId(BINARY, name)
        np.testing.assert_array_equal(apply_binary(transform, x1, x2), apply_binary(transform, x2, x1))
    for name in ["subtract", "divide"]:
        transform = TransformId(BINARY, name)
        assert not np.allclose(apply_binary(transform, x1, x2), apply_binary(transform, x2, x1))


def test_totality_on_adversarial_inputs():
    for transform in unary_ids():
        assert np.isfinite(apply_unary(transform, ADVERSARIAL)).all(), transform
    pairs = np.array(list(itertools.product(ADVERSARIAL, repeat=2)))
    for transform in binary_ids():
        assert np.isfinite(apply_binary(transform, pairs[:, 0], pairs[:, 1])).all(), transform


def test_apply_scaler_examples():
    column = lambda values: np.array(values, dtype=float).reshape(-1, 1)  # noqa: E731
    scaled, _ = apply_scaler(TransformId(SCALER, "minmax"), column([2, 4, 6]))
    np.testing.assert_allclose(scaled.ravel(), [0.0, 0.5, 1.0])
    scaled, _ = apply_scaler(TransformId(SCALER, "standard"), column([1, 2, 3]))
    np.testing.assert_allclose(scaled.ravel(), [-1.224744871, 0.0, 1.224744871], atol=1e-9)
    scaled, _ = apply_scaler(TransformId(SCALER, "robust"), column([1, 2, 3, 4, 100]))
    np.testing.assert_allclose(scaled.ravel(), [-1.0, -0.5, 0.0, 0.5, 48.5])


def test_apply_scaler_constant_columns_map_to_zero():
    X = np.column_stack([np.full(5, 7.0), np.arange(5.0)])
    for transform in scaler_ids():
        scaled, fitted = apply_scaler(transform, X)
        np.testing.assert_array_equal(scaled[:, 0], np.zeros(5))
        # a column that was constant during fitting stays 0 on other data
        other, _ = apply_scaler(transform, X + 1.0, fitted=fitted)
        np.testing.assert_array_equal(other[:, 0], np.zeros(5))


def test_apply_scaler_reuses_fitted_parameters():
    rng = np.random.default_rng(2)
    train, test = rng.normal(size=(30, 3)), rng.normal(size=(10, 3))
    for transform in scaler_ids():
        scaled, fitted = apply_scaler(transform, train)
        again, _ = apply_scaler(transform, train, fitted=fitted)
        np.testing.assert_array_equal(again, scaled)
        scaled_test, _ = apply_scaler(transform, test, fitted=fitted)
        np.testing.assert_array_equal(scaled_test, fitted.transform_matrix(test))


def test_minmax_is_idempotent():
    X = np.random.default_rng(3).normal(size=(25, 4))
    minmax = TransformId(SCALER, "minmax")
    once, _ = apply_scaler(minmax, X)
    twice, _ = apply_scaler(minmax, once)
    np.testing.assert_allclose(twice, once, atol=1e-15)


def test_apply_scaler_errors():
    _, fitted = apply_scaler(TransformId(SCALER, "minmax"), np.ones((3, 2)) * [[1.0, 2.0]])
    with pytest.raises(UnknownTransform):
        apply_scaler(TransformId(SCALER, "standard"), np.zeros((3, 2)), fitted=fitted)
    with pytest.raises(LengthMismatch):
        fitted.transform_matrix(np.zeros((3, 3)))
    with pytest.raises(UnknownTransform):
        apply_scaler(TransformId(UNARY, "log"), np.zeros((3, 2)))
