"""Versioned single-file persistence of a `Trm`.

The first line is a JSON header (format version, configuration fingerprint, meta-feature names,
normalization statistics, record count and the sha256 checksum of the body). Every following
line holds one record as a JSON object with sorted keys. Python's float repr is the shortest
string that parses back to the same double, so the round trip is bit-exact.
"""

import hashlib
import json
import os
from typing import Any, Dict, List

from src.errors import ConfigMismatch, CorruptFile, IoError, UnknownTransform, VersionMismatch
from src.metafeatures import META_FEATURE_NAMES
from src.serializer.interface import Serializer
from src.transforms import REGISTRY_VERSION, TransformId
from src.trm.store import Trm, TrmFingerprint, TrmRecord
from src.utils import get_pylogger

log = get_pylogger(__name__)

FORMAT_NAME = "featurecraft-trm"
FORMAT_VERSION = 1

HEADER_FIELDS = frozenset(
    {
        "format",
        "format_version",
        "registry_version",
        "n_meta_features",
        "bins",
        "meta_feature_names",
        "norm_min",
        "norm_max",
        "n_records",
        "checksum",
    }
)
RECORD_FIELDS = frozenset({"kind", "transform", "enc_a", "enc_b", "gain_a", "gain_b", "source"})


def _dumps(content: Dict[str, Any]) -> str:
    return json.dumps(content, sort_keys=True, allow_nan=False, separators=(",", ":"))


def record_to_dict(record: TrmRecord) -> Dict[str, Any]:
    return {
        "kind": record.kind,
        "transform": str(record.transform),
        "enc_a": list(record.enc_a),
        "enc_b": None if record.enc_b is None else list(record.enc_b),
        "gain_a": record.gain_a,
        "gain_b": record.gain_b,
        "source": record.source,
    }


def record_from_dict(content: Dict[str, Any]) -> TrmRecord:
    if not isinstance(content, dict):
        raise CorruptFile("records must be JSON objects")
    if set(content) != RECORD_FIELDS:
        unknown = sorted(set(content) - RECORD_FIELDS)
        missing = sorted(RECORD_FIELDS - set(content))
        raise CorruptFile(f"bad record fields (unknown: {unknown}, missing: {missing})")
    return TrmRecord(
        kind=content["kind"],
        transform=TransformId.parse(content["transform"]),
        enc_a=tuple(content["enc_a"]),
        enc_b=None if content["enc_b"] is None else tuple(content["enc_b"]),
        gain_a=content["gain_a"],
        gain_b=content["gain_b"],
        source=content["source"],
    )


def _body(trm: Trm) -> str:
    return "".join(_dumps(record_to_dict(record)) + "\n" for record in trm.records)


def _checksum(body: str) -> str:
    return hashlib.sha256(body.encode("utf-8")).hexdigest()


class TrmSerializer(Serializer):
    def __init__(self, **kwargs):
        self.default_kwargs = kwargs

    @classmethod
    def write(cls, trm: Trm, path: str) -> Dict[str, str]:
        realpath = os.path.realpath(path)
        log.info(f'serialize TRM with {len(trm.records)} records to "{realpath}" ...')
        body = _body(trm)
        header = {
            "format": FORMAT_NAME,
            "format_version": FORMAT_VERSION,
            "registry_version": trm.fingerprint.registry_version,
            "n_meta_features": trm.fingerprint.n_meta_features,
            "bins": trm.fingerprint.bins,
            "meta_feature_names": list(trm.meta_feature_names),
            "norm_min": list(trm.norm_min),
            "norm_max": list(trm.norm_max),
            "n_records": len(trm.records),
            "checksum": _checksum(body),
        }
        try:
            os.makedirs(os.path.dirname(realpath), exist_ok=True)
            with open(realpath, "w", encoding="utf-8", newline="\n") as f:
                f.write(_dumps(header) + "\n")
                f.write(body)
        except OSError as ex:
            raise IoError(f"can not write TRM file {realpath}: {ex}") from ex
        return {"path": realpath}

    @classmethod
    def read(cls, path: str) -> Trm:
        realpath = os.path.realpath(path)
        log.info(f'load TRM from "{realpath}" ...')
        try:
            with open(realpath, "r", encoding="utf-8", newline="") as f:
                content = f.read()
        except UnicodeDecodeError as ex:
            raise CorruptFile(f"TRM file {realpath} is not valid UTF-8") from ex
        except OSError as ex:
            raise IoError(f"can not read TRM file {realpath}: {ex}") from ex

        header_line, newline, body = content.partition("\n")
        if not newline:
            raise CorruptFile(f"TRM file {realpath} has no complete header line")
        header = cls._parse_header(header_line, realpath)

        if _checksum(body) != header["checksum"]:
            raise CorruptFile(f"checksum mismatch in TRM file {realpath}")
        lines = body.split("\n")
        if lines[-1] != "":
            raise CorruptFile(f"TRM file {realpath} does not end with a newline")
        lines = lines[:-1]
        if len(lines) != header["n_records"]:
            raise CorruptFile(
                f"TRM file {realpath} holds {len(lines)} records, the header announces "
                f"{header['n_records']}"
            )

        records: List[TrmRecord] = []
        for line_number, line in enumerate(lines, start=2):
            try:
                records.append(record_from_dict(json.loads(line)))
            except (ValueError, KeyError, TypeError, UnknownTransform) as ex:
                raise CorruptFile(f"bad record in {realpath}, line {line_number}: {ex}") from ex

        fingerprint = TrmFingerprint(
            n_meta_features=header["n_meta_features"],
            bins=header["bins"],
            registry_version=header["registry_version"],
        )
        return Trm(
            records=tuple(records),
            norm_min=tuple(float(v) for v in header["norm_min"]),
            norm_max=tuple(float(v) for v in header["norm_max"]),
            fingerprint=fingerprint,
            meta_feature_names=tuple(header["meta_feature_names"]),
        )

    @staticmethod
    def _parse_header(line: str, realpath: str) -> Dict[str, Any]:
        try:
            header = json.loads(line)
        except json.JSONDecodeError as ex:
            raise CorruptFile(f"unreadable header in TRM file {realpath}") from ex
        if not isinstance(header, dict) or header.get("format") != FORMAT_NAME:
            raise CorruptFile(f"{realpath} is not a TRM file")
        # the version is checked before the field set, later versions may add fields
        if header.get("format_version") != FORMAT_VERSION:
            raise VersionMismatch(
                f"TRM file {realpath} has format version {header.get('format_version')}, "
                f"expected {FORMAT_VERSION}"
            )
        if set(header) != HEADER_FIELDS:
            unknown = sorted(set(header) - HEADER_FIELDS)
            missing = sorted(HEADER_FIELDS - set(header))
            raise CorruptFile(
                f"bad header fields in {realpath} (unknown: {unknown}, missing: {missing})"
            )
        if header["registry_version"] != REGISTRY_VERSION:
            raise VersionMismatch(
                f"TRM file {realpath} was trained with transformation registry version "
                f"{header['registry_version']}, this is version {REGISTRY_VERSION}"
            )
        if not isinstance(header["meta_feature_names"], list):
            raise CorruptFile(f"meta-feature names in {realpath} are not a list")
        names = tuple(header["meta_feature_names"])
        if names != META_FEATURE_NAMES or header["n_meta_features"] != len(names):
            raise ConfigMismatch(
                f"TRM file {realpath} encodes the meta-features {list(names)}, the current "
                f"encoding uses {list(META_FEATURE_NAMES)}"
            )
        length = header["n_meta_features"] + header["bins"]
        if len(header["norm_min"]) != length or len(header["norm_max"]) != length:
            raise CorruptFile(f"normalization statistics in {realpath} have the wrong length")
        return header

    def read_with_defaults(self, **kwargs) -> Trm:
        all_kwargs = {**self.default_kwargs, **kwargs}
        return self.read(**all_kwargs)

    def write_with_defaults(self, **kwargs) -> Dict[str, str]:
        all_kwargs = {**self.default_kwargs, **kwargs}
        return self.write(**all_kwargs)

    def __call__(self, trm: Trm, **kwargs) -> Dict[str, str]:
        return self.write_with_defaults(trm=trm, **kwargs)


def save_trm(trm: Trm, path: str) -> str:
    return TrmSerializer.write(trm, path)["path"]


def load_trm(path: str) -> Trm:
    """Loads a TRM file. Use `src.pipeline.check_compatible` to compare it with an encoding
    configuration."""
    return TrmSerializer.read(path)
