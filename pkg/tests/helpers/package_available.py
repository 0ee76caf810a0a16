import platform
from importlib import metadata


def _package_available(package_name: str) -> bool:
    """Check if a package is available in your environment."""
    try:
        return metadata.distribution(package_name) is not None
    except metadata.PackageNotFoundError:
        return False


_IS_WINDOWS = platform.system() == "Windows"

_SH_AVAILABLE = not _IS_WINDOWS and _package_available("sh")

_OPTUNA_SWEEPER_AVAILABLE = _package_available("hydra-optuna-sweeper")
