import pyrootutils

root = pyrootutils.setup_root(
    search_from=__file__,
    indicator=[".project-root"],
    pythonpath=True,
    dotenv=True,
)

# ------------------------------------------------------------------------------------ #
# `pyrootutils.setup_root(...)` at the top of each entry file
# - searches for the ".project-root" marker in present and parent dirs to find the root dir
# - adds the root dir to the PYTHONPATH, so the entry files run from any place without
#   installing the project as a package
# - sets the PROJECT_ROOT environment variable used in "configs/paths/default.yaml"
# - loads environment variables from a ".env" file in the root dir (if it exists)
#
# https://github.com/ashleve/pyrootutils
# ------------------------------------------------------------------------------------ #

from typing import List, Optional, Tuple

import hydra
from omegaconf import DictConfig
from tabulate import tabulate

from src import utils
from src.dataset import Dataset
from src.errors import EmptyCorpus
from src.serializer import save_trm
from src.transforms import BINARY, SCALER, UNARY
from src.trm import train_trm

log = utils.get_pylogger(__name__)


@utils.task_wrapper
def train(cfg: DictConfig) -> Tuple[dict, dict]:
    """Trains the transformation recommendation matrix (TRM) on a corpus of datasets and
    writes it to `cfg.out`.

    This method is wrapped in optional @task_wrapper decorator which applies extra utilities
    before and after the call.

    Args:
        cfg (DictConfig): Configuration composed by Hydra.

    Returns:
        Tuple[dict, dict]: Dict with metrics and dict with all instantiated objects.
    """

    corpus: List[Dataset] = utils.instantiate_component(cfg, key="corpus")
    if not corpus:
        raise EmptyCorpus("the corpus config did not yield any dataset")
    encoding = utils.instantiate_component(cfg, key="encoding")
    mic_config = utils.instantiate_component(cfg, key="mic")

    utils.log_hyperparameters(config=cfg, n_datasets=len(corpus))

    log.info("Starting training!")
    trm = train_trm(
        corpus, encoding=encoding, mic_config=mic_config, gamma=cfg.gamma, threads=cfg.threads
    )
    trm_path = save_trm(trm, cfg.out)

    counts = {kind: trm.count(kind) for kind in (UNARY, BINARY, SCALER)}
    rows = list(counts.items()) + [["total", len(trm.records)]]
    print(tabulate(rows, headers=["kind", "records"]))

    metric_dict = {
        "n_datasets": len(corpus),
        **{f"n_{kind}_records": count for kind, count in counts.items()},
        "trm_path": trm_path,
    }
    object_dict = {"cfg": cfg, "corpus": corpus, "trm": trm}

    return metric_dict, object_dict


@hydra.main(version_base="1.2", config_path=str(root / "configs"), config_name="train.yaml")
@utils.exit_on_error
def main(cfg: DictConfig) -> Optional[dict]:
    metric_dict, _ = train(cfg)

    return metric_dict


if __name__ == "__main__":
    utils.prepare_sys_args()
    utils.prepare_omegaconf()
    main()
