import dataclasses
from typing import Iterator, Optional, Tuple

import numpy as np

from src.dataset import Dataset
from src.errors import UnknownTransform
from src.transforms.registry import (
    BINARY,
    BINARY_TRANSFORMS,
    UNARY,
    UNARY_TRANSFORMS,
    TransformId,
    apply_binary,
    apply_unary,
)

LEAF_PREFIX = "f:"


@dataclasses.dataclass(frozen=True)
class TransformExpr:
    """Expression tree over source features.

    Leaves reference a source feature by name, internal nodes apply a unary (one child) or
    binary (two ordered children) transformation. The string form is a nested prefix
    expression, e.g. `square(mult(log(f:x1),f:x2))`.
    """

    transform: Optional[TransformId] = None
    children: Tuple["TransformExpr", ...] = ()
    feature: Optional[str] = None

    def __post_init__(self) -> None:
        if self.transform is None:
            if self.feature is None or self.children:
                raise ValueError("a leaf needs a feature name and no children")
            return
        arity = {UNARY: 1, BINARY: 2}.get(self.transform.kind)
        if arity is None:
            raise UnknownTransform(f"{self.transform} can not be part of an expression")
        if len(self.children) != arity:
            raise ValueError(f"{self.transform} expects {arity} argument(s)")

    @classmethod
    def leaf(cls, feature: str) -> "TransformExpr":
        return cls(feature=feature)

    @classmethod
    def unary(cls, name: str, child: "TransformExpr") -> "TransformExpr":
        return cls(transform=TransformId(UNARY, name), children=(child,))

    @classmethod
    def binary(cls, name: str, left: "TransformExpr", right: "TransformExpr") -> "TransformExpr":
        return cls(transform=TransformId(BINARY, name), children=(left, right))

    @property
    def is_leaf(self) -> bool:
        return self.transform is None

    @property
    def order(self) -> int:
        """Number of transformation applications."""
        if self.is_leaf:
            return 0
        return 1 + sum(child.order for child in self.children)

    def leaves(self) -> Iterator[str]:
        if self.is_leaf:
            yield self.feature
        for child in self.children:
            yield from child.leaves()

    def __str__(self) -> str:
        if self.is_leaf:
            return f"{LEAF_PREFIX}{self.feature}"
        arguments = ",".join(str(child) for child in self.children)
        return f"{self.transform.name}({arguments})"


def _evaluate(expr: TransformExpr, dataset: Dataset) -> np.ndarray:
    if expr.is_leaf:
        if expr.feature not in dataset.feature_names:
            raise ValueError(f"expression references unknown feature '{expr.feature}'")
        return np.array(dataset.column(expr.feature), dtype=float)
    arguments = [_evaluate(child, dataset) for child in expr.children]
    if expr.transform.kind == UNARY:
        return apply_unary(expr.transform, arguments[0])
    return apply_binary(expr.transform, arguments[0], arguments[1])


def eval_expr(expr: TransformExpr, dataset: Dataset) -> np.ndarray:
    """Evaluates a generated feature bottom-up on the source features of `dataset`."""
    if expr.is_leaf:
        raise ValueError(f"'{expr}' is a source feature, not a generated feature (order 0)")
    return _evaluate(expr, dataset)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message: str) -> ValueError:
        return ValueError(f"{message} at position {self.pos} in '{self.text}'")

    def parse(self) -> TransformExpr:
        expr = self.expression()
        if self.pos != len(self.text):
            raise self.error("unexpected trailing characters")
        return expr

    def expression(self) -> TransformExpr:
        if self.text.startswith(LEAF_PREFIX, self.pos):
            return self.feature()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos] not in "(),":
            self.pos += 1
        name = self.text[start : self.pos]
        if not name or self.pos >= len(self.text) or self.text[self.pos] != "(":
            raise self.error("expected a transformation name followed by '('")
        self.pos += 1
        arguments = [self.expression()]
        while self.pos < len(self.text) and self.text[self.pos] == ",":
            self.pos += 1
            arguments.append(self.expression())
        if self.pos >= len(self.text) or self.text[self.pos] != ")":
            raise self.error("expected ')'")
        self.pos += 1
        if len(arguments) == 1 and name in UNARY_TRANSFORMS:
            return TransformExpr.unary(name, arguments[0])
        if len(arguments) == 2 and name in BINARY_TRANSFORMS:
            return TransformExpr.binary(name, arguments[0], arguments[1])
        raise UnknownTransform(f"no transformation '{name}' with {len(arguments)} argument(s)")

    def feature(self) -> TransformExpr:
        # feature names end at the next ',' or ')' that closes the enclosing application
        self.pos += len(LEAF_PREFIX)
        start, depth = self.pos, 0
        while self.pos < len(self.text):
            char = self.text[self.pos]
            if char == "(":
                depth += 1
            elif char == ")":
                if depth == 0:
                    break
                depth -= 1
            elif char == "," and depth == 0:
                break
            self.pos += 1
        if self.pos == start:
            raise self.error("empty feature name")
        return TransformExpr.leaf(self.text[start : self.pos])


def parse_expr(text: str) -> TransformExpr:
    """Inverse of `str(expr)`.

    >>> parse_expr("square(mult(log(f:x1),f:x2))").order
    3
    """
    return _Parser(text.strip()).parse()
