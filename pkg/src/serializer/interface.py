from abc import ABC, abstractmethod
from typing import Any, Dict


class Serializer(ABC):
    """This defines the interface for an artifact serializer.

    The serializer should not return the serialized content, but write it to disk and instead
    return some metadata such as the path of the written file.
    """

    @abstractmethod
    def __call__(self, obj: Any, **kwargs) -> Dict[str, str]: ...
