"""Command line interface: `featurecraft <command> [overrides ...]`.

Commands:
    train         train a TRM on a corpus of CSV files (configs/train.yaml)
    transform     engineer the features of a CSV file (configs/transform.yaml)
    evaluate      compare classifiers on original and engineered features (configs/evaluate.yaml)
    print-config  print the composed config of a command, e.g. `featurecraft print-config transform`

Arguments are hydra overrides (`depth=3`), flags (`--depth 3`, `--depth=3`) or
`LOAD_CONFIG:<file>` / `--config <file>` with key=value lines.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 internal error.
"""

import importlib
import sys
from typing import List, Optional

from hydra import compose, initialize_config_dir
from hydra.core.global_hydra import GlobalHydra

from src import utils
from src.errors import ConfigError
from src.utils.task_utils import EXIT_CONFIG_ERROR

log = utils.get_pylogger(__name__)

COMMANDS = {
    "train": "src.train",
    "transform": "src.transform",
    "evaluate": "src.evaluate",
}
PRINT_CONFIG = "print-config"


def _usage() -> str:
    return __doc__


def print_config(command: str, overrides: List[str]) -> None:
    """Composes the config of `command` with the given overrides and prints it as a tree."""
    # importing the entry module sets up PROJECT_ROOT for `configs/paths/default.yaml`
    module = importlib.import_module(COMMANDS[command])
    GlobalHydra.instance().clear()
    with initialize_config_dir(version_base="1.2", config_dir=str(module.root / "configs")):
        cfg = compose(config_name=f"{command}.yaml", overrides=overrides)
    utils.print_config_tree(cfg, resolve=False, save_to_file=False)


def run_command(command: str, args: List[str]) -> None:
    module = importlib.import_module(COMMANDS[command])
    sys.argv = [module.__file__] + args
    try:
        module.main()
    except SystemExit as ex:
        # hydra exits with 1 when the config can not be composed (e.g. an unknown key)
        if ex.code == 1:
            raise SystemExit(EXIT_CONFIG_ERROR) from ex
        raise


def main(argv: Optional[List[str]] = None) -> None:
    args = list(sys.argv[1:] if argv is None else argv)
    if not args or args[0] in ("-h", "--help"):
        print(_usage())
        raise SystemExit(0 if args else EXIT_CONFIG_ERROR)

    command, rest = args[0], args[1:]
    utils.prepare_omegaconf()
    try:
        if command == PRINT_CONFIG:
            if not rest or rest[0] not in COMMANDS:
                print(_usage(), file=sys.stderr)
                raise SystemExit(EXIT_CONFIG_ERROR)
            overrides = utils.expand_config_file_args(utils.translate_flag_args(rest[1:]))
            utils.exit_on_error(print_config)(rest[0], overrides)
            return
        if command not in COMMANDS:
            print(f"error: unknown command: {command}\n{_usage()}", file=sys.stderr)
            raise SystemExit(EXIT_CONFIG_ERROR)
        run_command(command, utils.expand_config_file_args(utils.translate_flag_args(rest)))
    except ConfigError as ex:
        print(f"error: {type(ex).__name__}: {ex}", file=sys.stderr)
        raise SystemExit(EXIT_CONFIG_ERROR) from ex


if __name__ == "__main__":
    main()
