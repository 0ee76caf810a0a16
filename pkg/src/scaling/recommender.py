import dataclasses
from typing import Optional

import numpy as np

from src.dataset import Dataset
from src.errors import BadThreshold, DegenerateSample
from src.scaling.normality import shapiro_wilk
from src.transforms import SCALER, TransformId
from src.utils.logging_utils import get_pylogger

log = get_pylogger(__name__)

ROBUST = "robust"
STANDARD = "standard"
MINMAX = "minmax"

NORMALITY_LEVEL = 0.05
FENCE_FACTOR = 1.5


@dataclasses.dataclass(frozen=True)
class ScalerDecision:
    """Outcome of the scaler decision chain. `sw_p` is the median per-column Shapiro-Wilk
    p-value; it is not computed when the outlier test already decides."""

    choice: str
    outlier_fraction: float
    sw_p: Optional[float] = None

    @property
    def transform(self) -> TransformId:
        return TransformId(SCALER, self.choice)


def outlier_proportion(X: np.ndarray) -> float:
    """Fraction of cells outside the Tukey fences [Q1 - 1.5 IQR, Q3 + 1.5 IQR] of their column
    (quantiles by linear interpolation between order statistics)."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.size == 0:
        raise ValueError("outlier proportion of an empty matrix")
    q1, q3 = np.quantile(X, [0.25, 0.75], axis=0, method="linear")
    iqr = q3 - q1
    outside = (X < q1 - FENCE_FACTOR * iqr) | (X > q3 + FENCE_FACTOR * iqr)
    return float(outside.sum() / X.size)


def _column_pvalue(x: np.ndarray) -> float:
    try:
        return shapiro_wilk(x).pvalue
    except DegenerateSample:
        return 0.0


def decide(outlier_fraction: float, sw_p: Optional[float], gamma: float) -> str:
    if outlier_fraction > gamma:
        return ROBUST
    if sw_p is not None and sw_p > NORMALITY_LEVEL:
        return STANDARD
    return MINMAX


def recommend_scaler(dataset: Dataset, gamma: float = 0.05) -> ScalerDecision:
    """Robust scaler if the outlier proportion exceeds `gamma`, else standard scaler if the
    data is normally distributed (median per-column Shapiro-Wilk p-value above 0.05), else
    min-max scaler."""
    if not 0.0 <= gamma <= 1.0:
        raise BadThreshold(f"gamma must be in [0, 1], got {gamma}")
    fraction = outlier_proportion(dataset.X)
    if fraction > gamma:
        decision = ScalerDecision(choice=ROBUST, outlier_fraction=fraction)
    else:
        pvalues = [_column_pvalue(dataset.X[:, j]) for j in range(dataset.n_features)]
        median_p = float(np.median(pvalues))
        decision = ScalerDecision(
            choice=decide(fraction, median_p, gamma), outlier_fraction=fraction, sw_p=median_p
        )
    log.debug(
        f"scaler for <{dataset.name}>: {decision.choice} "
        f"<outliers={decision.outlier_fraction:.4f}> <sw_p={decision.sw_p}>"
    )
    return decision
