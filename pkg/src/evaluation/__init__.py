from .harness import (
    EvalReport,
    EvalResult,
    compare,
    engineering_fold_transform,
    evaluate,
    fold_accuracy,
    mean_accuracy,
    prepare_folds,
    preprocessing_fold_transform,
)
