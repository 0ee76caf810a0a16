from .normality import ShapiroResult, shapiro_wilk
from .recommender import (
    MINMAX,
    ROBUST,
    STANDARD,
    ScalerDecision,
    decide,
    outlier_proportion,
    recommend_scaler,
)
