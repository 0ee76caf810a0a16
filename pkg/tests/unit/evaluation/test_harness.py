import dataclasses
import json

import numpy as np
import pytest

import src.evaluation.harness
from src.dataset import stratified_folds
from src.dataset.synthetic import make_dataset
from src.errors import ClassTooSmall, ConfigMismatch, UnknownClassifier
from src.evaluation import (
    EvalReport,
    EvalResult,
    compare,
    evaluate,
    fold_accuracy,
    prepare_folds,
    preprocessing_fold_transform,
)
from src.metafeatures import EncodingConfig
from src.pipeline import FeatureEngineeringPipeline, PipelineConfig
from src.serializer import load_trm
from src.transforms import BINARY, TransformId
from src.trm import Trm, TrmFingerprint, records_for_dataset


@pytest.fixture(scope="module")
def trm(trm_file):
    return load_trm(trm_file)


@pytest.fixture(scope="module")
def dataset():
    return make_dataset("ratio", n_instances=120, seed=11, n_noise=1, name="ratio")


def test_fold_accuracy():
    linear = make_dataset("linear", n_instances=100, seed=0)
    assert fold_accuracy(linear, linear, "gnb") > 0.8
    assert 0.0 <= fold_accuracy(linear.take(range(50)), linear.take(range(50, 100)), "knn5") <= 1.0


def test_evaluate():
    linear = make_dataset("linear", n_instances=150, seed=1)
    accuracy = evaluate(linear, "logreg", k=5, seed=0)
    assert 0.8 < accuracy <= 1.0
    assert evaluate(linear, "logreg", k=5, seed=0) == accuracy
    with pytest.raises(UnknownClassifier):
        evaluate(linear, "forest")


def test_prepare_folds_partition(dataset):
    folds = prepare_folds(dataset, k=4, seed=3)
    assert len(folds) == 4
    assert sum(test.n_instances for _, test in folds) == dataset.n_instances
    for train, test in folds:
        assert train.n_instances + test.n_instances == dataset.n_instances


def test_compare(trm, dataset):
    report = compare(dataset, trm, PipelineConfig(depth=1), k=3, seed=0)
    assert [result.classifier for result in report.results] == ["knn5", "logreg", "gnb"]
    assert report.datasets == ["ratio"]
    for result in report.results:
        assert 0.0 <= result.original <= 1.0
        assert 0.0 <= result.engineered <= 1.0
        assert result.delta == result.engineered - result.original

    document = report.to_dict({"timestamp": "2024-01-01T00:00:00"})
    assert document["metadata"] == {"timestamp": "2024-01-01T00:00:00"}
    assert document["results"]["k"] == 3
    assert len(document["results"]["scores"]) == 3
    json.dumps(document, allow_nan=False)
    assert "improved_any" in report.table()


def test_compare_is_deterministic(trm, dataset):
    config = PipelineConfig(depth=1)
    first = compare(dataset, trm, config, k=3, seed=5, classifiers=["gnb"])
    second = compare(dataset, trm, config, k=3, seed=5, classifiers=["gnb"], threads=2)
    assert first == second


def test_engineering_only_sees_the_training_part(monkeypatch, trm, dataset):
    seen = []

    class RecordingPipeline(FeatureEngineeringPipeline):
        def __call__(self, train):
            seen.append(train)
            return super().__call__(train)

    monkeypatch.setattr(src.evaluation.harness, "FeatureEngineeringPipeline", RecordingPipeline)
    compare(dataset, trm, PipelineConfig(depth=1), k=3, seed=2, classifiers=["knn5"])

    plan = stratified_folds(dataset, k=3, seed=2)
    assert len(seen) == 3
    for train, (train_rows, _) in zip(seen, plan.splits()):
        np.testing.assert_array_equal(train.X, dataset.X[train_rows])
        np.testing.assert_array_equal(train.y, dataset.y[train_rows])


def test_imputation_means_come_from_the_training_part():
    base = make_dataset("linear", n_instances=100, seed=13, name="linear")
    train_rows, test_rows = next(stratified_folds(base, k=5, seed=0).splits())
    X = np.array(base.X)
    X[test_rows[0], 0] = np.nan
    shifted = X.copy()
    shifted[test_rows[1:], 0] += 1000.0
    expected = X[train_rows, 0].mean()

    for matrix in (X, shifted):
        folds = prepare_folds(
            base.with_matrix(matrix), k=5, seed=0, fold_transform=preprocessing_fold_transform
        )
        _, test = folds[0]
        assert test.X[0, 0] == pytest.approx(expected)
        assert not np.isnan(test.X).any()


def test_test_rows_never_enter_fitting(monkeypatch, trm):
    base = make_dataset("ratio", n_instances=120, seed=12, name="ratio")
    X = np.array(base.X)
    X[::7, 2] = np.nan
    dataset = base.with_matrix(X)
    # the values of the first column identify the instances
    row_of = {value: row for row, value in enumerate(dataset.X[:, 0])}
    assert len(row_of) == dataset.n_instances
    fitted = {"preprocessing": [], "pipeline": [], "classifier": []}

    def rows(part):
        return sorted(row_of[value] for value in part.X[:, 0])

    fit_preprocessing = src.evaluation.harness.fit_preprocessing

    def recording_fit_preprocessing(train):
        fitted["preprocessing"].append(rows(train))
        return fit_preprocessing(train)

    class RecordingPipeline(FeatureEngineeringPipeline):
        def __call__(self, train):
            fitted["pipeline"].append(rows(train))
            return super().__call__(train)

    build_classifier = src.evaluation.harness.build_classifier

    def recording_build_classifier(name):
        model = build_classifier(name)
        fit = model.fit

        def recording_fit(X, y):
            fitted["classifier"].append(len(y))
            return fit(X, y)

        model.fit = recording_fit
        return model

    monkeypatch.setattr(
        src.evaluation.harness, "fit_preprocessing", recording_fit_preprocessing
    )
    monkeypatch.setattr(src.evaluation.harness, "FeatureEngineeringPipeline", RecordingPipeline)
    monkeypatch.setattr(src.evaluation.harness, "build_classifier", recording_build_classifier)
    compare(dataset, trm, PipelineConfig(depth=1), k=3, seed=2, classifiers=["gnb"])

    splits = list(stratified_folds(dataset, k=3, seed=2).splits())
    train_parts = [sorted(train_rows.tolist()) for train_rows, _ in splits]
    # original folds first, then the engineered ones
    assert fitted["preprocessing"] == train_parts * 2
    assert fitted["pipeline"] == train_parts
    assert fitted["classifier"] == [len(part) for part in train_parts] * 2
    for seen, (_, test_rows) in zip(fitted["pipeline"], splits):
        assert set(seen).isdisjoint(test_rows.tolist())


def test_engineering_a_product_improves_logistic_regression():
    records = [
        record
        for record in records_for_dataset(make_dataset("product", n_instances=150, seed=3))
        if record.kind != BINARY or record.transform == TransformId(BINARY, "mult")
    ]
    fingerprint = TrmFingerprint.from_encoding_config(EncodingConfig())
    product_trm = Trm.from_records(records, fingerprint)
    assert product_trm.count(BINARY) > 0

    dataset = make_dataset("product", n_instances=200, seed=21, name="product")
    config = PipelineConfig(depth=1, select=1.0, tau=0.0)
    report = compare(dataset, product_trm, config, k=5, seed=0, classifiers=["logreg"])
    (result,) = report.results
    assert result.delta > 0


@pytest.mark.parametrize("seed", range(3))
@pytest.mark.parametrize("classifier", ["knn5", "logreg", "gnb"])
def test_shuffled_labels_score_near_the_majority_class(classifier, seed):
    base = make_dataset("linear", n_instances=400, seed=seed, name="linear")
    y = np.random.default_rng(seed).permutation(base.y)
    dataset = dataclasses.replace(base, y=y)
    majority = np.bincount(y).max() / len(y)
    assert abs(evaluate(dataset, classifier, k=5, seed=seed) - majority) <= 0.1


def test_compare_errors(trm, dataset):
    with pytest.raises(ClassTooSmall):
        compare(dataset, trm, k=100)
    with pytest.raises(UnknownClassifier):
        compare(dataset, trm, classifiers=["knn5", "forest"])
    with pytest.raises(ConfigMismatch):
        compare(dataset, trm, encoding=EncodingConfig(bins=trm.fingerprint.bins + 2))


def test_report_helpers():
    report = EvalReport.merge(
        [
            EvalReport(results=(EvalResult("a", "gnb", 0.5, 0.75),), k=5, seed=0),
            EvalReport(results=(EvalResult("b", "gnb", 0.5, 0.5),), k=5, seed=0),
        ]
    )
    assert report.datasets == ["a", "b"]
    assert report.improved_any("a")
    assert not report.improved_any("b")
    assert report.results[0].asdict()["delta"] == 0.25
    with pytest.raises(ValueError):
        EvalReport.merge([])
