import json

import numpy as np
import pytest

from src.errors import ConfigMismatch, CorruptFile, IoError, VersionMismatch
from src.metafeatures import META_FEATURE_NAMES, EncodingConfig
from src.serializer import TrmSerializer, load_trm, save_trm
from src.transforms import BINARY, SCALER, UNARY, binary_ids, scaler_ids, unary_ids
from src.trm import Trm, TrmFingerprint, TrmRecord

FINGERPRINT = TrmFingerprint.from_encoding_config(EncodingConfig(bins=4))


def random_trm(n_records: int, seed: int = 0) -> Trm:
    rng = np.random.default_rng(seed)
    length = FINGERPRINT.encoding_length

    def values(size):
        # wide dynamic range, including values without a short decimal representation
        return tuple((rng.normal(size=size) * 10.0 ** rng.integers(-200, 200, size=size)).tolist())

    records = []
    for i in range(n_records):
        kind = (UNARY, BINARY, SCALER)[i % 3]
        if kind == UNARY:
            transform = unary_ids()[i % len(unary_ids())]
            record = TrmRecord(kind, transform, values(length), gain_a=rng.uniform(1e-6, 1.0))
        elif kind == BINARY:
            transform = binary_ids()[i % len(binary_ids())]
            record = TrmRecord(
                kind,
                transform,
                values(length),
                enc_b=values(length),
                gain_a=rng.uniform(1e-6, 1.0),
                gain_b=rng.uniform(1e-6, 1.0),
                source=f"dataset_{i}:x1,x2",
            )
        else:
            transform = scaler_ids()[i % len(scaler_ids())]
            record = TrmRecord(
                kind, transform, values(FINGERPRINT.n_meta_features), source=f"ds_é_{i}"
            )
        records.append(record)
    return Trm.from_records(records, FINGERPRINT)


@pytest.fixture
def trm_path(tmp_path):
    return save_trm(random_trm(30), str(tmp_path / "model.trm"))


def test_round_trip_is_exact(tmp_path):
    trm = random_trm(1000, seed=1)
    path = save_trm(trm, str(tmp_path / "sub" / "model.trm"))
    loaded = load_trm(path)
    assert loaded == trm
    assert loaded.fingerprint == FINGERPRINT
    for original, restored in zip(trm.records, loaded.records):
        assert np.array_equal(np.asarray(original.enc_a), np.asarray(restored.enc_a))


def test_empty_trm_round_trip(tmp_path):
    trm = Trm.from_records([], FINGERPRINT)
    assert load_trm(save_trm(trm, str(tmp_path / "empty.trm"))) == trm


def test_serializer_defaults(tmp_path):
    serializer = TrmSerializer(path=str(tmp_path / "default.trm"))
    trm = random_trm(6)
    serializer(trm)
    assert serializer.read_with_defaults() == trm


def _rewrite(path, transform):
    with open(path, encoding="utf-8") as f:
        content = f.read()
    with open(path, "w", encoding="utf-8") as f:
        f.write(transform(content))


def test_corrupted_body_byte(trm_path):
    def flip(content):
        header_end = content.index("\n")
        position = content.index('"gain_a":', header_end) + len('"gain_a":') + 2
        digit = content[position]
        replacement = "1" if digit != "1" else "2"
        return content[:position] + replacement + content[position + 1 :]

    _rewrite(trm_path, flip)
    with pytest.raises(CorruptFile):
        load_trm(trm_path)


def test_truncated_file(trm_path):
    _rewrite(trm_path, lambda content: content[: len(content) // 2])
    with pytest.raises(CorruptFile):
        load_trm(trm_path)


def test_garbage_file(tmp_path):
    path = tmp_path / "garbage.trm"
    path.write_bytes(b"\xff\xfe not a trm")
    with pytest.raises(CorruptFile):
        load_trm(str(path))
    path.write_text('{"format": "something-else"}\n')
    with pytest.raises(CorruptFile):
        load_trm(str(path))


def _edit_header(**changes):
    def edit(content):
        header_line, _, body = content.partition("\n")
        header = json.loads(header_line)
        header.update(changes)
        return json.dumps(header) + "\n" + body

    return edit


def test_format_version_mismatch(trm_path):
    _rewrite(trm_path, _edit_header(format_version=2, added_in_version_2=True))
    with pytest.raises(VersionMismatch):
        load_trm(trm_path)


def test_registry_version_mismatch(trm_path):
    _rewrite(trm_path, _edit_header(registry_version="0"))
    with pytest.raises(VersionMismatch):
        load_trm(trm_path)


def test_unknown_header_field(trm_path):
    _rewrite(trm_path, _edit_header(unexpected=1))
    with pytest.raises(CorruptFile):
        load_trm(trm_path)


def test_missing_file(tmp_path):
    with pytest.raises(IoError):
        load_trm(str(tmp_path / "missing.trm"))


def test_meta_feature_layout_mismatch(trm_path):
    reordered = list(reversed(META_FEATURE_NAMES))
    _rewrite(trm_path, _edit_header(meta_feature_names=reordered))
    with pytest.raises(ConfigMismatch):
        load_trm(trm_path)


def test_meta_feature_count_mismatch(trm_path):
    extended = list(META_FEATURE_NAMES) + ["mean_noise_ratio"]
    _rewrite(trm_path, _edit_header(meta_feature_names=extended))
    with pytest.raises(ConfigMismatch):
        load_trm(trm_path)
