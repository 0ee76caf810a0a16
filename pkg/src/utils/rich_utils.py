from pathlib import Path
from typing import Sequence

import rich
import rich.syntax
import rich.tree
from omegaconf import DictConfig, OmegaConf
from omegaconf.errors import InterpolationResolutionError, MissingMandatoryValue

from src.utils.logging_utils import get_pylogger

log = get_pylogger(__name__)


def print_config_tree(
    cfg: DictConfig,
    print_order: Sequence[str] = (
        "corpus",
        "encoding",
        "mic",
        "causal",
        "pipeline",
        "paths",
        "extras",
    ),
    resolve: bool = False,
    save_to_file: bool = False,
) -> None:
    """Prints content of DictConfig using Rich library and its tree structure.

    Args:
        cfg (DictConfig): Configuration composed by Hydra.
        print_order (Sequence[str], optional): Determines in what order config components are printed.
        resolve (bool, optional): Whether to resolve reference fields of DictConfig.
        save_to_file (bool, optional): Whether to export config to the hydra output folder.
    """

    style = "dim"
    tree = rich.tree.Tree("CONFIG", style=style, guide_style=style)

    queue = []

    # add fields from `print_order` to queue
    for field in print_order:
        if field in cfg:
            queue.append(field)
        else:
            log.debug(f"Field '{field}' not found in config. Skipping '{field}' config printing...")

    # add all the other fields to queue (not specified in `print_order`)
    for field in cfg:
        if field not in queue and field != "hydra":
            queue.append(field)

    # generate config tree from queue
    for field in queue:
        branch = tree.add(field, style=style, guide_style=style)

        try:
            config_group = cfg[field]
        except MissingMandatoryValue:
            config_group = "???"
        except InterpolationResolutionError:
            config_group = str(OmegaConf.to_container(cfg, resolve=False)[field])
        if isinstance(config_group, DictConfig):
            try:
                branch_content = OmegaConf.to_yaml(config_group, resolve=resolve)
            except InterpolationResolutionError:
                # e.g. a reference to a mandatory value that is not set yet
                branch_content = OmegaConf.to_yaml(config_group, resolve=False)
        else:
            branch_content = str(config_group)

        branch.add(rich.syntax.Syntax(branch_content, "yaml"))

    # print config tree
    rich.print(tree)

    # save config tree to file
    if save_to_file:
        output_dir = Path(cfg.paths.output_dir)
        output_dir.mkdir(parents=True, exist_ok=True)
        with open(output_dir / "config_tree.log", "w") as file:
            rich.print(tree, file=file)
