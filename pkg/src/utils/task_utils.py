import functools
import os
import sys
import time
import warnings
from pathlib import Path
from typing import Callable, Dict, List, Optional

from hydra.errors import HydraException, InstantiationException
from omegaconf import DictConfig
from omegaconf.errors import OmegaConfBaseException

from src.errors import ConfigError, DataError
from src.utils.logging_utils import get_pylogger
from src.utils.rich_utils import print_config_tree

log = get_pylogger(__name__)

EXIT_OK = 0
EXIT_CONFIG_ERROR = 2
EXIT_DATA_ERROR = 3
EXIT_INTERNAL_ERROR = 4


def task_wrapper(task_func: Callable) -> Callable:
    """Optional decorator that wraps the task function in extra utilities.

    Utilities:
    - Calling the `utils.extras()` before the task is started
    - Logging the exception if occurs
    - Logging the task total execution time
    - Logging the output dir
    """

    def wrap(cfg: DictConfig):

        # apply extra utilities
        extras(cfg)

        # execute the task
        start_time = time.time()
        try:
            task_result = task_func(cfg=cfg)
        except Exception as ex:
            log.exception("")  # save exception to `.log` file
            raise ex
        finally:
            path = Path(cfg.paths.output_dir, "exec_time.log")
            content = f"'{cfg.pipeline_type}' execution time: {time.time() - start_time} (s)"
            save_file(path, content)  # save task execution time (even if exception occurs)

        log.info(f"Output dir: {cfg.paths.output_dir}")

        return task_result

    return wrap


def extras(cfg: DictConfig) -> None:
    """Applies optional utilities before the task is started.

    Utilities:
    - Ignoring python warnings
    - Rich config printing
    """

    # return if no `extras` config
    if not cfg.get("extras"):
        log.warning("Extras config not found! <cfg.extras=null>")
        return

    # disable python warnings
    if cfg.extras.get("ignore_warnings"):
        log.info("Disabling python warnings! <cfg.extras.ignore_warnings=True>")
        warnings.filterwarnings("ignore")

    # pretty print config tree using Rich library
    if cfg.extras.get("print_config"):
        log.info("Printing config tree with Rich! <cfg.extras.print_config=True>")
        print_config_tree(cfg, resolve=True, save_to_file=True)


def save_file(path: str, content: str) -> None:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w+") as file:
        file.write(content)


def exit_code_for(exception: BaseException) -> int:
    """Maps an exception raised by a task to the exit code of the command line interface."""

    # hydra wraps errors raised while instantiating a config node
    while isinstance(exception, InstantiationException) and exception.__cause__ is not None:
        exception = exception.__cause__
    if isinstance(exception, (ConfigError, OmegaConfBaseException, HydraException)):
        return EXIT_CONFIG_ERROR
    if isinstance(exception, (DataError, FileNotFoundError)):
        return EXIT_DATA_ERROR
    return EXIT_INTERNAL_ERROR


def exit_on_error(task_func: Callable) -> Callable:
    """Decorator for hydra main functions: converts exceptions into `SystemExit` with the exit
    code given by `exit_code_for` and prints the message to standard error.

    `SystemExit` is not an `Exception`, so hydra passes it through unchanged.
    """

    @functools.wraps(task_func)
    def wrap(*args, **kwargs):
        try:
            return task_func(*args, **kwargs)
        except Exception as ex:
            code = exit_code_for(ex)
            print(f"error: {type(ex).__name__}: {ex}", file=sys.stderr)
            raise SystemExit(code) from ex

    return wrap


def read_key_value_file(path: str) -> Dict[str, str]:
    """Reads a flat `key=value` config file. Empty lines and `#` comments are ignored.

    Example:
        # settings.cfg
        depth=3   # maximal transformation order
        select=0.6
    """

    values: Dict[str, str] = {}
    with open(path) as f:
        for line_number, line in enumerate(f, start=1):
            content = line.split("#", maxsplit=1)[0].strip()
            if not content:
                continue
            if "=" not in content:
                raise ConfigError(f"expected key=value in {path}, line {line_number}: {line!r}")
            key, value = content.split("=", maxsplit=1)
            values[key.strip()] = value.strip()
    return values


def translate_flag_args(args: List[str]) -> List[str]:
    """Converts `--some-flag value` and `--some-flag=value` into hydra overrides
    `some_flag=value`. Hydra's own flags (e.g. `--cfg`, `--multirun`) are passed through.

    Example:
        >>> translate_flag_args(["--depth", "3", "--select=0.5", "seed=1"])
        ['depth=3', 'select=0.5', 'seed=1']
    """

    hydra_flags = {
        "--cfg",
        "-c",
        "--resolve",
        "--package",
        "-p",
        "--multirun",
        "-m",
        "--help",
        "-h",
        "--hydra-help",
        "--info",
        "--config-path",
        "-cp",
        "--config-name",
        "-cn",
        "--config-dir",
        "-cd",
        "--shell-completion",
        "-sc",
        "--run",
        "-r",
        "--version",
        "--experimental-rerun",
    }
    result = []
    idx = 0
    while idx < len(args):
        arg = args[idx]
        flag = arg.split("=", maxsplit=1)[0]
        if not arg.startswith("--") or flag in hydra_flags:
            result.append(arg)
            # hydra flags with a value
            if flag in {"--cfg", "-c", "--package", "-p", "--info"} and "=" not in arg:
                if idx + 1 < len(args) and not args[idx + 1].startswith("-"):
                    result.append(args[idx + 1])
                    idx += 1
            idx += 1
            continue
        if "=" in arg:
            name, value = arg[2:].split("=", maxsplit=1)
        else:
            name = arg[2:]
            if idx + 1 >= len(args):
                raise ConfigError(f"flag {arg} expects a value")
            value = args[idx + 1]
            idx += 1
        result.append(f"{name.replace('-', '_')}={value}")
        idx += 1
    return result


def expand_config_file_args(
    args: List[str],
    load_prefix: str = "LOAD_CONFIG:",
    config_keys: tuple = ("config", "config_file"),
) -> List[str]:
    """Replaces `LOAD_CONFIG:<file>` (or `config=<file>`, as produced by `--config <file>`) with
    the overrides read from that key=value file.

    Values from the file come first, so values given on the command line override them. A key
    given both in the file and on the command line appears only once (command line wins).
    """

    file_overrides: Dict[str, str] = {}
    remaining: List[str] = []
    for arg in args:
        path: Optional[str] = None
        if arg.startswith(load_prefix):
            path = arg[len(load_prefix) :]
        elif "=" in arg and arg.split("=", maxsplit=1)[0] in config_keys:
            path = arg.split("=", maxsplit=1)[1]
        if path is None:
            remaining.append(arg)
            continue
        log.info(f"Loading overrides from config file <{path}>")
        if not os.path.exists(path):
            raise ConfigError(f"config file not found: {path}")
        file_overrides.update(read_key_value_file(path))

    cli_keys = {arg.split("=", maxsplit=1)[0] for arg in remaining if "=" in arg}
    expanded = [f"{key}={value}" for key, value in file_overrides.items() if key not in cli_keys]
    return expanded + remaining


def prepare_sys_args() -> None:
    """Rewrites `sys.argv` in place so that `--flag value` arguments and `LOAD_CONFIG:<file>`
    reach hydra as plain overrides."""

    sys.argv[1:] = expand_config_file_args(translate_flag_args(sys.argv[1:]))


def get_metric_value(metric_dict: dict, metric_name: Optional[str]) -> Optional[float]:
    """Safely retrieves value of the metric logged by the task."""

    if not metric_name:
        log.info("Metric name is None! Skipping metric value retrieval...")
        return None

    if metric_name not in metric_dict:
        raise ConfigError(
            f"Metric value not found! <metric_name={metric_name}>\n"
            "Make sure `optimized_metric` in `hparams_search` config is one of "
            f"{sorted(metric_dict)}"
        )

    metric_value = float(metric_dict[metric_name])
    log.info(f"Retrieved metric value! <{metric_name}={metric_value}>")

    return metric_value
