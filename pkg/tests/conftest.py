from typing import List, Optional

import pyrootutils
import pytest
from hydra import compose, initialize
from hydra.core.global_hydra import GlobalHydra
from omegaconf import DictConfig, open_dict

from src.dataset import save_csv
from src.dataset.synthetic import make_corpus, make_dataset
from src.serializer import save_trm
from src.trm import train_trm
from src.utils import prepare_omegaconf

ROOT = pyrootutils.setup_root(
    search_from=__file__,
    indicator=[".project-root"],
    pythonpath=True,
    dotenv=True,
    cwd=True,
)
prepare_omegaconf()

# a small seeded corpus keeps the end-to-end tests fast
TRAIN_OVERRIDES = [
    "experiment=synthetic_corpus",
    "corpus.n_datasets=3",
    "corpus.n_instances=100",
]


def _compose(config_name: str, overrides: Optional[List[str]] = None) -> DictConfig:
    with initialize(version_base="1.2", config_path="../configs"):
        cfg = compose(config_name=config_name, return_hydra_config=True, overrides=overrides)

        # set defaults for all tests
        with open_dict(cfg):
            cfg.paths.root_dir = str(ROOT)
            cfg.extras.print_config = False

    return cfg


def cfg_train_global(overrides=None) -> DictConfig:
    return _compose("train.yaml", TRAIN_OVERRIDES + list(overrides or []))


def cfg_train_csv_global(data_dir: str, overrides=None) -> DictConfig:
    return _compose("train.yaml", [f"data_dir={data_dir}"] + list(overrides or []))


def cfg_transform_global(overrides=None) -> DictConfig:
    return _compose("transform.yaml", overrides)


def cfg_evaluate_global(overrides=None) -> DictConfig:
    return _compose("evaluate.yaml", overrides)


@pytest.fixture(scope="session")
def training_corpus():
    return make_corpus(n_datasets=4, n_instances=120, seed=100)


# a TRM trained once per test session, shared by all tests that only read it
@pytest.fixture(scope="session")
def trm_file(tmp_path_factory, training_corpus) -> str:
    path = tmp_path_factory.mktemp("trm") / "test.trm"
    return save_trm(train_trm(training_corpus), str(path))


@pytest.fixture(scope="session")
def input_csv(tmp_path_factory) -> str:
    path = tmp_path_factory.mktemp("data") / "product.csv"
    dataset = make_dataset("product", n_instances=150, seed=7, n_noise=2, name="product")
    return save_csv(dataset, str(path))


def with_tmp_paths(cfg: DictConfig, tmp_path) -> DictConfig:
    with open_dict(cfg):
        cfg.paths.output_dir = str(tmp_path)
        cfg.paths.log_dir = str(tmp_path)
        cfg.paths.save_dir = str(tmp_path)
    return cfg


# this is called by each test which uses `cfg_train` arg
# each test generates its own temporary logging path
@pytest.fixture(scope="function")
def cfg_train(tmp_path) -> DictConfig:
    cfg = with_tmp_paths(cfg_train_global(), tmp_path)

    yield cfg

    GlobalHydra.instance().clear()


@pytest.fixture(scope="function")
def cfg_transform(tmp_path, trm_file, input_csv) -> DictConfig:
    overrides = [f"trm={trm_file}", f"input={input_csv}", "target=class"]
    cfg = with_tmp_paths(cfg_transform_global(overrides), tmp_path)

    yield cfg

    GlobalHydra.instance().clear()


@pytest.fixture(scope="function")
def cfg_evaluate(tmp_path, trm_file, input_csv) -> DictConfig:
    overrides = [f"trm={trm_file}", f"input={input_csv}", "target=class"]
    cfg = with_tmp_paths(cfg_evaluate_global(overrides), tmp_path)

    yield cfg

    GlobalHydra.instance().clear()
