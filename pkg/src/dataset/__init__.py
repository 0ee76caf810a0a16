from .folds import stratified_folds
from .io import load_corpus, load_csv, parse_target_map, save_csv
from .preprocessing import FittedPreprocessing, fit_preprocessing, preprocess
from .types import CATEGORICAL, NUMERIC, TEXT, ColumnSpec, Dataset, FoldPlan


def load_preprocessed_corpus(data_dir: str, target_map=None):
    """`load_corpus` followed by `preprocess` on every dataset (target of `corpus/csv_dir`)."""
    return [preprocess(dataset) for dataset in load_corpus(data_dir, target_map)]
