from .config_utils import instantiate_component, prepare_omegaconf
from .logging_utils import get_pylogger, log_hyperparameters
from .rich_utils import print_config_tree
from .task_utils import (
    exit_code_for,
    exit_on_error,
    expand_config_file_args,
    extras,
    get_metric_value,
    prepare_sys_args,
    read_key_value_file,
    save_file,
    task_wrapper,
    translate_flag_args,
)
