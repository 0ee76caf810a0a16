import os

import pytest
from hydra.core.global_hydra import GlobalHydra
from hydra.core.hydra_config import HydraConfig

from src.dataset import save_csv
from src.dataset.synthetic import make_corpus
from src.errors import EmptyCorpus, IoError
from src.serializer import load_trm
from src.train import train
from tests.conftest import cfg_train_csv_global, with_tmp_paths


def test_train_synthetic_corpus(cfg_train):
    """Train a TRM on the seeded synthetic corpus."""
    HydraConfig().set_config(cfg_train)
    metric_dict, object_dict = train(cfg_train)

    assert metric_dict["n_datasets"] == 3
    assert metric_dict["n_scaler_records"] == 3
    assert metric_dict["trm_path"] == os.path.realpath(cfg_train.out)
    assert os.path.exists(metric_dict["trm_path"])
    assert load_trm(metric_dict["trm_path"]) == object_dict["trm"]
    assert os.path.exists(os.path.join(cfg_train.paths.output_dir, "exec_time.log"))


def test_train_csv_dir(tmp_path):
    """Train a TRM on a directory of CSV files."""
    data_dir = tmp_path / "corpus"
    for dataset in make_corpus(n_datasets=2, n_instances=80, seed=50):
        save_csv(dataset, str(data_dir / f"{dataset.name}.csv"))

    cfg = with_tmp_paths(cfg_train_csv_global(str(data_dir)), tmp_path)
    HydraConfig().set_config(cfg)
    metric_dict, object_dict = train(cfg)
    GlobalHydra.instance().clear()

    assert metric_dict["n_datasets"] == 2
    assert [dataset.name for dataset in object_dict["corpus"]] == ["log_51", "product_50"]


def test_train_empty_dir(tmp_path):
    data_dir = tmp_path / "empty"
    data_dir.mkdir()
    cfg = with_tmp_paths(cfg_train_csv_global(str(data_dir)), tmp_path)
    HydraConfig().set_config(cfg)
    with pytest.raises(EmptyCorpus):
        train(cfg)
    with pytest.raises(IoError):
        train(with_tmp_paths(cfg_train_csv_global(str(tmp_path / "missing")), tmp_path))
    GlobalHydra.instance().clear()
