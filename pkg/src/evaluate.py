import pyrootutils

root = pyrootutils.setup_root(
    search_from=__file__,
    indicator=[".project-root"],
    pythonpath=True,
    dotenv=True,
)

import math
from datetime import datetime
from typing import Optional, Tuple

import hydra
from omegaconf import DictConfig

from src import utils
from src.dataset import load_csv
from src.evaluation import compare
from src.serializer import load_trm, write_json_file

log = utils.get_pylogger(__name__)


@utils.task_wrapper
def evaluate(cfg: DictConfig) -> Tuple[dict, dict]:
    """Compares the cross validated accuracies of the built-in classifiers on the original and
    on the engineered features of a CSV file.

    The feature engineering runs inside every fold on its training part only. The report is
    printed as a table and written as JSON to `cfg.report`; only its `metadata` header
    depends on the time of the run.

    Args:
        cfg (DictConfig): Configuration composed by Hydra.

    Returns:
        Tuple[dict, dict]: Dict with metrics and dict with all instantiated objects.
    """

    trm = load_trm(cfg.trm)
    encoding = utils.instantiate_component(cfg, key="encoding")
    dag_options = utils.instantiate_component(cfg, key="causal")
    pipeline_config = utils.instantiate_component(cfg, key="pipeline")

    hparams = utils.log_hyperparameters(config=cfg)

    # preprocessing is fitted inside each fold
    dataset = load_csv(cfg.input, target=cfg.target)

    log.info("Starting evaluation!")
    report = compare(
        dataset,
        trm,
        config=pipeline_config,
        k=cfg.k,
        seed=cfg.seed,
        classifiers=list(cfg.classifiers),
        encoding=encoding,
        dag_options=dag_options,
        threads=cfg.threads,
    )
    print(report.table())

    metadata = {
        "timestamp": datetime.now().isoformat(timespec="seconds"),
        "config": hparams,
        "trm": cfg.trm,
        "input": cfg.input,
        "target": cfg.target,
    }
    report_file = write_json_file(report.to_dict(metadata), cfg.report)

    deltas = [result.delta for result in report.results]
    metric_dict = {
        **{f"{r.classifier}/original": r.original for r in report.results},
        **{f"{r.classifier}/engineered": r.engineered for r in report.results},
        "mean_delta": math.fsum(deltas) / len(deltas),
        "improved_any": report.improved_any(dataset.name),
        "report": report_file,
    }
    object_dict = {"cfg": cfg, "trm": trm, "dataset": dataset, "report": report}

    return metric_dict, object_dict


@hydra.main(version_base="1.2", config_path=str(root / "configs"), config_name="evaluate.yaml")
@utils.exit_on_error
def main(cfg: DictConfig) -> Optional[float]:
    metric_dict, _ = evaluate(cfg)

    # return optimized metric (used by the hydra sweeper in `hparams_search/`)
    return utils.get_metric_value(metric_dict=metric_dict, metric_name=cfg.get("optimized_metric"))


if __name__ == "__main__":
    utils.prepare_sys_args()
    utils.prepare_omegaconf()
    main()
