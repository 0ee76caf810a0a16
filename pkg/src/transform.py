import pyrootutils

root = pyrootutils.setup_root(
    search_from=__file__,
    indicator=[".project-root"],
    pythonpath=True,
    dotenv=True,
)

import os
from typing import Optional, Tuple

import hydra
from omegaconf import DictConfig
from tabulate import tabulate

from src import utils
from src.dataset import load_csv, preprocess, save_csv
from src.pipeline import FeatureEngineeringPipeline
from src.serializer import load_trm, write_json_file

log = utils.get_pylogger(__name__)


def lineage_path(cfg: DictConfig) -> str:
    """`cfg.lineage_out` or, if not set, `<out without extension>.lineage.json`."""
    if cfg.get("lineage_out"):
        return cfg.lineage_out
    return os.path.splitext(cfg.out)[0] + ".lineage.json"


@utils.task_wrapper
def transform(cfg: DictConfig) -> Tuple[dict, dict]:
    """Engineers the features of a single CSV file with a trained TRM.

    Writes the engineered CSV to `cfg.out`, the lineage of every column as JSON next to it
    and, if `cfg.causal_graph_out` is set, the pruned causal graph in DOT format.
    """

    trm = load_trm(cfg.trm)
    encoding = utils.instantiate_component(cfg, key="encoding")
    dag_options = utils.instantiate_component(cfg, key="causal")
    pipeline_config = utils.instantiate_component(cfg, key="pipeline")

    log.info(f"Instantiating pipeline <{FeatureEngineeringPipeline.__name__}>")
    pipeline = FeatureEngineeringPipeline(
        trm, config=pipeline_config, encoding=encoding, dag_options=dag_options
    )

    utils.log_hyperparameters(config=cfg)

    dataset = preprocess(load_csv(cfg.input, target=cfg.target))
    engineered = pipeline(dataset)

    out_path = save_csv(engineered.to_dataset(), cfg.out)
    lineage_file = write_json_file(engineered.lineage(), lineage_path(cfg))
    if cfg.get("causal_graph_out"):
        utils.save_file(cfg.causal_graph_out, engineered.causal_graph_dot())
        log.info(f"Causal graph saved to {cfg.causal_graph_out}")

    counts = {
        "selected originals": engineered.base.n_features,
        "generated": engineered.n_generated,
        "total": engineered.base.n_features + engineered.n_generated,
    }
    print(tabulate(list(counts.items()), headers=["features", "count"]))

    metric_dict = {
        "n_selected": counts["selected originals"],
        "n_generated": counts["generated"],
        "n_features": counts["total"],
        "out": out_path,
        "lineage": lineage_file,
    }
    object_dict = {"cfg": cfg, "trm": trm, "pipeline": pipeline, "engineered": engineered}

    return metric_dict, object_dict


@hydra.main(version_base="1.2", config_path=str(root / "configs"), config_name="transform.yaml")
@utils.exit_on_error
def main(cfg: DictConfig) -> Optional[dict]:
    metric_dict, _ = transform(cfg)

    return metric_dict


if __name__ == "__main__":
    utils.prepare_sys_args()
    utils.prepare_omegaconf()
    main()
