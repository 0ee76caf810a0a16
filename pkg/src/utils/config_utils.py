from typing import Any, Optional

from hydra.errors import InstantiationException
from hydra.utils import instantiate
from omegaconf import DictConfig, OmegaConf

from src.errors import FeatureCraftError
from src.utils.logging_utils import get_pylogger

logger = get_pylogger(__name__)


def instantiate_component(config: DictConfig, key: str, **kwargs) -> Optional[Any]:
    """Instantiates the config group `key` if it is present and has a `_target_`."""

    component_config = config.get(key)
    if not component_config or "_target_" not in component_config:
        logger.warning(f"{key} config is empty.")
        return None
    logger.info(f"Instantiating {key} <{component_config._target_}>")
    try:
        return instantiate(component_config, _convert_="partial", **kwargs)
    except InstantiationException as ex:
        # surface our own errors (e.g. a threshold out of range) instead of the wrapper
        if isinstance(ex.__cause__, FeatureCraftError):
            raise ex.__cause__
        raise


def prepare_omegaconf():
    # register replace resolver (used to replace "/" with "-" in names to use them as e.g. study names)
    if not OmegaConf.has_resolver("replace"):
        OmegaConf.register_new_resolver("replace", lambda s, x, y: s.replace(x, y))
    else:
        logger.warning("OmegaConf resolver 'replace' is already registered")
