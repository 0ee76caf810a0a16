import json
import os
from typing import Any, Dict, Mapping

from src.serializer.interface import Serializer
from src.utils import get_pylogger

log = get_pylogger(__name__)


class JsonSerializer(Serializer):
    """Writes reports (lineage, evaluation results) as JSON documents.

    Keys are sorted and floats are written with their shortest round-trip representation, so
    identical content gives byte-identical files.
    """

    def __init__(self, **kwargs):
        self.default_kwargs = kwargs

    @classmethod
    def write(
        cls,
        content: Mapping[str, Any],
        path: str,
        file_name: str = "report.json",
        indent: int = 2,
        **kwargs,
    ) -> Dict[str, str]:
        realpath = os.path.realpath(path)
        log.info(f'serialize report to "{os.path.join(realpath, file_name)}" ...')
        os.makedirs(realpath, exist_ok=True)
        full_file_name = os.path.join(realpath, file_name)
        if os.path.exists(full_file_name):
            log.warning(f"report file {full_file_name} already exists, it will be overwritten!")
        with open(full_file_name, "w") as f:
            json.dump(content, f, indent=indent, sort_keys=True, allow_nan=False, **kwargs)
            f.write("\n")
        return {"path": realpath, "file_name": file_name}

    @classmethod
    def read(cls, path: str, file_name: str = "report.json") -> Dict[str, Any]:
        full_file_name = os.path.join(os.path.realpath(path), file_name)
        log.info(f'load report from "{full_file_name}" ...')
        with open(full_file_name) as f:
            return json.load(f)

    def read_with_defaults(self, **kwargs) -> Dict[str, Any]:
        all_kwargs = {**self.default_kwargs, **kwargs}
        return self.read(**all_kwargs)

    def write_with_defaults(self, **kwargs) -> Dict[str, str]:
        all_kwargs = {**self.default_kwargs, **kwargs}
        return self.write(**all_kwargs)

    def __call__(self, content: Mapping[str, Any], **kwargs) -> Dict[str, str]:
        return self.write_with_defaults(content=content, **kwargs)


def write_json_file(content: Mapping[str, Any], file_path: str) -> str:
    """Convenience wrapper around `JsonSerializer.write` taking a single file path."""
    directory, file_name = os.path.split(os.path.abspath(file_path))
    JsonSerializer.write(content, path=directory, file_name=file_name)
    return file_path
