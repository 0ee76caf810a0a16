import logging
from typing import Optional, Union

from omegaconf import DictConfig


def get_pylogger(name=__name__) -> logging.Logger:
    """Initializes python command line logger."""

    return logging.getLogger(name)


log = get_pylogger(__name__)

# the user-facing knobs, printed at task start in this order
HYPERPARAMETER_KEYS = (
    "seed",
    "depth",
    "select",
    "tau",
    "gamma",
    "bins",
    "cap_factor",
    "k",
    "mic_alpha",
    "mic_c",
    "threads",
)


def log_hyperparameters(
    config: Optional[Union[dict, DictConfig]] = None,
    key_prefix: str = "",
    **kwargs,
) -> dict:
    """Logs the flat hyperparameters of a run and returns them as a plain dict.

    Additional keyword arguments are logged (and returned) as well, e.g. record counts.
    """

    hparams = {}

    if config is not None:
        for key in HYPERPARAMETER_KEYS:
            if key in config:
                hparams[f"{key_prefix}{key}"] = config[key]

    for k, v in kwargs.items():
        hparams[f"{key_prefix}{k}"] = v

    if not hparams:
        log.warning("No hyperparameters found! Skipping hyperparameter logging...")
        return hparams

    log.info(
        "Hyperparameters: " + ", ".join(f"<{key}={value}>" for key, value in hparams.items())
    )
    return hparams
