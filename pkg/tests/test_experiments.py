import os

import pytest
from hydra.core.global_hydra import GlobalHydra
from hydra.core.hydra_config import HydraConfig
from omegaconf import DictConfig

from src.train import train
from src.transform import transform
from tests.conftest import cfg_train_global, cfg_transform_global, with_tmp_paths

# strip extension to have nicer test ids, e.g. test_experiment[deep_generation]
ext = ".yaml"
AVAILABLE_EXPERIMENTS = [
    exp_yaml.replace(ext, "")
    for exp_yaml in os.listdir("configs/experiment")
    if exp_yaml.endswith(ext)
]

# experiments that configure the training corpus, all others configure the feature engineering
TRAIN_EXPERIMENTS = ["synthetic_corpus"]


@pytest.fixture(scope="function", params=sorted(AVAILABLE_EXPERIMENTS))
def cfg_experiment(tmp_path, request, trm_file, input_csv) -> DictConfig:
    if request.param in TRAIN_EXPERIMENTS:
        cfg = cfg_train_global(overrides=[f"experiment={request.param}"])
    else:
        overrides = [f"experiment={request.param}", f"trm={trm_file}", f"input={input_csv}"]
        cfg = cfg_transform_global(overrides=overrides + ["target=class"])

    yield with_tmp_paths(cfg, tmp_path)

    GlobalHydra.instance().clear()


@pytest.mark.slow
def test_experiment(cfg_experiment):
    """Run the task of each experiment config once."""
    HydraConfig().set_config(cfg_experiment)
    task = train if cfg_experiment.pipeline_type == "training" else transform
    metric_dict, _ = task(cfg_experiment)
    assert metric_dict
