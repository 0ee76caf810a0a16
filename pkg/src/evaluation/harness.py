import dataclasses
import math
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed
from tabulate import tabulate

from src.causal import DagOptions
from src.dataset import Dataset, fit_preprocessing, stratified_folds
from src.metafeatures import EncodingConfig
from src.models import CLASSIFIERS, build_classifier
from src.pipeline import FeatureEngineeringPipeline, PipelineConfig, check_compatible
from src.trm import Trm
from src.utils.logging_utils import get_pylogger

log = get_pylogger(__name__)

FoldTransform = Callable[[Dataset, Dataset], Tuple[Dataset, Dataset]]


@dataclasses.dataclass(frozen=True)
class EvalResult:
    dataset: str
    classifier: str
    original: float
    engineered: float

    @property
    def delta(self) -> float:
        return self.engineered - self.original

    def asdict(self) -> Dict[str, Any]:
        return {
            "dataset": self.dataset,
            "classifier": self.classifier,
            "original": self.original,
            "engineered": self.engineered,
            "delta": self.delta,
        }


@dataclasses.dataclass(frozen=True)
class EvalReport:
    """Mean k-fold accuracies on the original and the engineered version of each dataset."""

    results: Tuple[EvalResult, ...]
    k: int
    seed: int

    @classmethod
    def merge(cls, reports: Sequence["EvalReport"]) -> "EvalReport":
        if not reports:
            raise ValueError("can not merge an empty list of reports")
        return cls(
            results=tuple(result for report in reports for result in report.results),
            k=reports[0].k,
            seed=reports[0].seed,
        )

    @property
    def datasets(self) -> List[str]:
        return list(dict.fromkeys(result.dataset for result in self.results))

    def improved_any(self, dataset: str) -> bool:
        return any(r.delta > 0 for r in self.results if r.dataset == dataset)

    def table(self) -> str:
        rows = [
            [r.dataset, r.classifier, r.original, r.engineered, r.delta]
            + [self.improved_any(r.dataset)]
            for r in self.results
        ]
        return tabulate(
            rows,
            headers=["dataset", "classifier", "original", "engineered", "delta", "improved_any"],
            floatfmt=".4f",
        )

    def to_dict(self, metadata: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        """JSON document: a `metadata` header (timestamps, configuration) and the results."""
        return {
            "metadata": dict(metadata or {}),
            "results": {
                "k": self.k,
                "seed": self.seed,
                "scores": [result.asdict() for result in self.results],
                "datasets": {
                    name: {"improved_any": self.improved_any(name)} for name in self.datasets
                },
            },
        }


def fold_accuracy(train: Dataset, test: Dataset, classifier: str) -> float:
    model = build_classifier(classifier).fit(train.X, train.y)
    predictions = model.predict(test.X)
    return float(np.count_nonzero(predictions == test.y)) / test.n_instances


def prepare_folds(
    dataset: Dataset,
    k: int,
    seed: int,
    fold_transform: Optional[FoldTransform] = None,
    threads: int = 1,
) -> List[Tuple[Dataset, Dataset]]:
    """(train, test) datasets of every fold. `fold_transform` maps the raw pair of a fold to
    the pair the classifiers see, it must only fit on the training part."""
    plan = stratified_folds(dataset, k=k, seed=seed)
    pairs = [
        (dataset.take(train, name=dataset.name), dataset.take(test, name=dataset.name))
        for train, test in plan.splits()
    ]
    if fold_transform is None:
        return pairs
    return Parallel(n_jobs=threads, prefer="threads")(
        delayed(fold_transform)(train, test) for train, test in pairs
    )


def preprocessing_fold_transform(train: Dataset, test: Dataset) -> Tuple[Dataset, Dataset]:
    """Drops columns and imputes missing values of both parts with what the training part
    alone determines."""
    fitted = fit_preprocessing(train)
    return fitted.apply(train), fitted.apply(test)


def mean_accuracy(folds: Sequence[Tuple[Dataset, Dataset]], classifier: str) -> float:
    accuracies = [fold_accuracy(train, test, classifier) for train, test in folds]
    return math.fsum(accuracies) / len(accuracies)


def evaluate(
    dataset: Dataset,
    classifier: str,
    k: int = 5,
    seed: int = 0,
    fold_transform: Optional[FoldTransform] = None,
    threads: int = 1,
) -> float:
    """Mean accuracy of `classifier` over a stratified k-fold cross validation. Without a
    `fold_transform` each fold is preprocessed with `preprocessing_fold_transform`."""
    build_classifier(classifier)
    fold_transform = fold_transform or preprocessing_fold_transform
    folds = prepare_folds(dataset, k, seed, fold_transform=fold_transform, threads=threads)
    return mean_accuracy(folds, classifier)


def engineering_fold_transform(
    trm: Trm,
    config: PipelineConfig,
    encoding: EncodingConfig = EncodingConfig(),
    dag_options: DagOptions = DagOptions(),
) -> FoldTransform:
    """Fold transform preprocessing and engineering the training part, then replaying both
    (kept columns and imputation means, selected columns, expressions, fitted scaler) on the
    test part."""
    pipeline = FeatureEngineeringPipeline(trm, config, encoding, dag_options)

    def transform(train: Dataset, test: Dataset) -> Tuple[Dataset, Dataset]:
        train, test = preprocessing_fold_transform(train, test)
        engineered = pipeline(train)
        return engineered.to_dataset(), engineered.apply_to(test)

    return transform


def compare(
    dataset: Dataset,
    trm: Trm,
    config: PipelineConfig = PipelineConfig(),
    k: int = 5,
    seed: int = 0,
    classifiers: Sequence[str] = tuple(CLASSIFIERS),
    encoding: EncodingConfig = EncodingConfig(),
    dag_options: DagOptions = DagOptions(),
    threads: int = 1,
) -> EvalReport:
    """Cross-validated accuracies of every classifier on the original dataset and on its
    engineered version. `dataset` is the raw dataset: preprocessing and engineering happen
    inside each fold and are fitted on its training part only."""
    check_compatible(trm, encoding)
    for classifier in classifiers:
        build_classifier(classifier)

    log.info(f"Evaluating <{dataset.name}> on the original features ...")
    original_folds = prepare_folds(
        dataset, k, seed, fold_transform=preprocessing_fold_transform, threads=threads
    )
    log.info(f"Evaluating <{dataset.name}> on the engineered features ...")
    engineered_folds = prepare_folds(
        dataset,
        k,
        seed,
        fold_transform=engineering_fold_transform(trm, config, encoding, dag_options),
        threads=threads,
    )

    results = []
    for classifier in classifiers:
        result = EvalResult(
            dataset=dataset.name,
            classifier=classifier,
            original=mean_accuracy(original_folds, classifier),
            engineered=mean_accuracy(engineered_folds, classifier),
        )
        log.info(
            f"<{dataset.name}> {classifier}: original={result.original:.4f}, "
            f"engineered={result.engineered:.4f}, delta={result.delta:+.4f}"
        )
        results.append(result)
    return EvalReport(results=tuple(results), k=k, seed=seed)
