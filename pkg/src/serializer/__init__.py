from .interface import Serializer
from .json import JsonSerializer, write_json_file
from .trm import TrmSerializer, load_trm, save_trm
