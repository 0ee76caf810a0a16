from .expression import TransformExpr, eval_expr, parse_expr
from .registry import (
    BINARY,
    EPSILON,
    REGISTRY_VERSION,
    SCALER,
    UNARY,
    FittedScaler,
    TransformId,
    apply_binary,
    apply_scaler,
    apply_unary,
    binary_ids,
    scaler_ids,
    unary_ids,
)
