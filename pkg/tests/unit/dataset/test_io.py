import numpy as np
import pytest

from src.dataset import CATEGORICAL, NUMERIC, TEXT, load_corpus, load_csv, parse_target_map, save_csv
from src.errors import (
    EmptyCorpus,
    IoError,
    MissingTarget,
    ParseError,
    RegressionTarget,
    TooFewClasses,
)


def write(path, content: str) -> str:
    path.write_text(content, encoding="utf-8")
    return str(path)


def test_load_csv(tmp_path):
    path = write(tmp_path / "small.csv", "a,b,cls\n1,2,x\n3,,y\n5,6,x\n7,8,y\n")
    dataset = load_csv(path, target="cls")
    assert dataset.name == "small"
    assert dataset.n_features == 2
    assert dataset.n_instances == 4
    assert dataset.feature_names == ["a", "b"]
    assert dataset.target_name == "cls"
    # labels in first-appearance order
    assert dataset.labels == ("x", "y")
    np.testing.assert_array_equal(dataset.y, [0, 1, 0, 1])
    assert np.isnan(dataset.X[1, 1])
    np.testing.assert_array_equal(dataset.X[:, 0], [1.0, 3.0, 5.0, 7.0])


def test_load_csv_column_kinds(tmp_path):
    rows = ["num,cat,txt,cls"] + [f"{i},c{i % 3},word{i},{i % 2}" for i in range(30)]
    dataset = load_csv(write(tmp_path / "kinds.csv", "\n".join(rows) + "\n"), target="cls")
    assert [column.kind for column in dataset.columns] == [NUMERIC, CATEGORICAL, TEXT]
    assert np.isnan(dataset.X[:, 1]).all()
    assert np.isnan(dataset.X[:, 2]).all()


def test_load_csv_missing_target(tmp_path):
    path = write(tmp_path / "small.csv", "a,b\n1,2\n3,4\n")
    with pytest.raises(MissingTarget):
        load_csv(path, target="cls")


def test_load_csv_single_class(tmp_path):
    path = write(tmp_path / "small.csv", "a,cls\n1,x\n2,x\n3,x\n")
    with pytest.raises(TooFewClasses):
        load_csv(path, target="cls")


def test_load_csv_regression_target(tmp_path):
    path = write(tmp_path / "small.csv", "a,cls\n1,0.5\n2,1.25\n3,2.0\n")
    with pytest.raises(RegressionTarget):
        load_csv(path, target="cls")


def test_load_csv_missing_label_reports_row(tmp_path):
    path = write(tmp_path / "small.csv", "a,cls\n1,x\n2,\n3,y\n")
    with pytest.raises(ParseError) as excinfo:
        load_csv(path, target="cls")
    assert excinfo.value.row == 3


def test_load_csv_unreadable_row(tmp_path):
    path = write(tmp_path / "small.csv", "a,cls\n1,x\n2,y,extra,fields\n3,y\n")
    with pytest.raises(ParseError):
        load_csv(path, target="cls")


def test_load_csv_file_not_found(tmp_path):
    with pytest.raises(IoError):
        load_csv(str(tmp_path / "missing.csv"), target="cls")


def test_save_csv_keeps_values_and_labels(tmp_path):
    source = write(tmp_path / "small.csv", "a,b,cls\n0.1,2,x\n3,1e-300,y\n5,6,x\n")
    dataset = load_csv(source, target="cls")
    saved = load_csv(save_csv(dataset, str(tmp_path / "out" / "small.csv")), target="cls")
    assert saved == dataset


def test_parse_target_map(tmp_path):
    assert parse_target_map(None) == {}
    assert parse_target_map("label") == {"*": "label"}
    assert parse_target_map({"a.csv": "y"}) == {"a.csv": "y"}
    path = write(tmp_path / "targets.cfg", "# targets\na=cls\nb.csv = label\n")
    assert parse_target_map(path) == {"a": "cls", "b.csv": "label"}


def test_load_corpus(tmp_path):
    write(tmp_path / "b.csv", "x,label\n1,p\n2,q\n")
    write(tmp_path / "a.csv", "x,cls\n1,p\n2,q\n")
    write(tmp_path / "notes.txt", "ignored")
    corpus = load_corpus(str(tmp_path), target_map={"a": "cls", "b.csv": "label"})
    assert [dataset.name for dataset in corpus] == ["a", "b"]
    assert [dataset.target_name for dataset in corpus] == ["cls", "label"]


def test_load_corpus_errors(tmp_path):
    with pytest.raises(IoError):
        load_corpus(str(tmp_path / "missing"))
    with pytest.raises(EmptyCorpus):
        load_corpus(str(tmp_path))
    write(tmp_path / "a.csv", "x,cls\n1,p\n2,q\n")
    with pytest.raises(MissingTarget):
        load_corpus(str(tmp_path), target_map={"b": "cls"})
