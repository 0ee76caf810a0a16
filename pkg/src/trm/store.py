import dataclasses
from functools import cached_property
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from sklearn.metrics.pairwise import cosine_similarity

from src.errors import ConfigMismatch, EmptyTrm
from src.metafeatures import META_FEATURE_NAMES, EncodingConfig
from src.transforms import BINARY, REGISTRY_VERSION, SCALER, UNARY, TransformId

AS_STORED = "as_stored"
SWAPPED = "swapped"


@dataclasses.dataclass(frozen=True)
class TrmFingerprint:
    """Configuration an encoding has to be produced under to be comparable with the TRM."""

    n_meta_features: int
    bins: int
    registry_version: str = REGISTRY_VERSION

    @classmethod
    def from_encoding_config(cls, config: EncodingConfig) -> "TrmFingerprint":
        return cls(n_meta_features=config.n_meta_features, bins=config.bins)

    @property
    def encoding_length(self) -> int:
        return self.n_meta_features + self.bins


@dataclasses.dataclass(frozen=True)
class TrmRecord:
    """A transformation that raised the MIC with the labels on some training feature(s).

    Unary records carry one feature encoding and one gain, binary records two of each (the
    transformation was applied as t(a, b)), scaler records a dataset encoding and no gain.
    """

    kind: str
    transform: TransformId
    enc_a: Tuple[float, ...]
    enc_b: Optional[Tuple[float, ...]] = None
    gain_a: Optional[float] = None
    gain_b: Optional[float] = None
    source: str = ""

    def __post_init__(self) -> None:
        if self.transform.kind != self.kind:
            raise ValueError(f"record of kind {self.kind} can not hold {self.transform}")
        object.__setattr__(self, "enc_a", tuple(float(v) for v in self.enc_a))
        if self.enc_b is not None:
            object.__setattr__(self, "enc_b", tuple(float(v) for v in self.enc_b))
        if self.kind == BINARY:
            if self.enc_b is None or self.gain_a is None or self.gain_b is None:
                raise ValueError("binary records need two encodings and two gains")
            if not (self.gain_a > 0 and self.gain_b > 0):
                raise ValueError("binary records need positive gains for both arguments")
        elif self.kind == UNARY:
            if self.enc_b is not None or self.gain_b is not None or self.gain_a is None:
                raise ValueError("unary records need exactly one encoding and one gain")
            if not self.gain_a > 0:
                raise ValueError("unary records need a positive gain")
        elif self.enc_b is not None or self.gain_a is not None or self.gain_b is not None:
            raise ValueError("scaler records carry a dataset encoding and no gains")


def compute_norm_stats(
    records: Iterable[TrmRecord], fingerprint: TrmFingerprint
) -> Tuple[Tuple[float, ...], Tuple[float, ...]]:
    """Per component (min, max) over all stored encodings. Meta-feature components pool the
    dataset encodings of scaler records and the feature encodings."""
    length = fingerprint.encoding_length
    lo = np.full(length, np.inf)
    hi = np.full(length, -np.inf)
    for record in records:
        for encoding in (record.enc_a, record.enc_b):
            if encoding is None:
                continue
            values = np.asarray(encoding)
            lo[: values.size] = np.minimum(lo[: values.size], values)
            hi[: values.size] = np.maximum(hi[: values.size], values)
    unseen = ~np.isfinite(lo)
    lo[unseen], hi[unseen] = 0.0, 0.0
    return tuple(lo.tolist()), tuple(hi.tolist())


@dataclasses.dataclass(frozen=True)
class LookupResult:
    transform: TransformId
    similarity: float
    record_index: int
    orientation: str = AS_STORED

    @property
    def swapped(self) -> bool:
        return self.orientation == SWAPPED


@dataclasses.dataclass(frozen=True)
class Trm:
    """Transformation recommendation matrix: records plus the normalization statistics of the
    encodings, frozen at training time."""

    records: Tuple[TrmRecord, ...]
    norm_min: Tuple[float, ...]
    norm_max: Tuple[float, ...]
    fingerprint: TrmFingerprint
    meta_feature_names: Tuple[str, ...] = META_FEATURE_NAMES

    @classmethod
    def from_records(cls, records: Sequence[TrmRecord], fingerprint: TrmFingerprint) -> "Trm":
        records = tuple(records)
        norm_min, norm_max = compute_norm_stats(records, fingerprint)
        return cls(records=records, norm_min=norm_min, norm_max=norm_max, fingerprint=fingerprint)

    def count(self, kind: str) -> int:
        return sum(1 for record in self.records if record.kind == kind)

    def normalize(self, encoding: np.ndarray) -> np.ndarray:
        """Min-max normalizes (a prefix of) the encoding components, clipped to [0, 1]."""
        values = np.asarray(encoding, dtype=float)
        lo = np.asarray(self.norm_min[: values.shape[-1]])
        span = np.asarray(self.norm_max[: values.shape[-1]]) - lo
        with np.errstate(divide="ignore", invalid="ignore"):
            normalized = np.where(span > 0, (values - lo) / span, 0.0)
        return np.clip(normalized, 0.0, 1.0)

    def _indices(self, kind: str) -> List[int]:
        return [i for i, record in enumerate(self.records) if record.kind == kind]

    @cached_property
    def _unary_matrix(self) -> np.ndarray:
        rows = [self.normalize(self.records[i].enc_a) for i in self._indices(UNARY)]
        return np.vstack(rows) if rows else np.empty((0, self.fingerprint.encoding_length))

    @cached_property
    def _binary_matrix(self) -> np.ndarray:
        rows = [
            np.concatenate(
                [self.normalize(self.records[i].enc_a), self.normalize(self.records[i].enc_b)]
            )
            for i in self._indices(BINARY)
        ]
        return np.vstack(rows) if rows else np.empty((0, 2 * self.fingerprint.encoding_length))

    @cached_property
    def _scaler_matrix(self) -> np.ndarray:
        rows = [self.normalize(self.records[i].enc_a) for i in self._indices(SCALER)]
        return np.vstack(rows) if rows else np.empty((0, self.fingerprint.n_meta_features))


def _check_encoding(trm: Trm, encoding: np.ndarray, length: int) -> np.ndarray:
    encoding = np.asarray(encoding, dtype=float).ravel()
    if encoding.size != length:
        raise ConfigMismatch(
            f"encoding has {encoding.size} components, the TRM expects {length} "
            f"({trm.fingerprint})"
        )
    if not trm.records:
        raise EmptyTrm("the TRM does not contain any record")
    return encoding


def _similarities(query: np.ndarray, matrix: np.ndarray) -> Optional[np.ndarray]:
    if matrix.shape[0] == 0 or not np.any(query):
        return None
    return cosine_similarity(query[None, :], matrix)[0]


def lookup_unary(trm: Trm, encoding: np.ndarray, tau: float) -> Optional[LookupResult]:
    """Most similar unary record (cosine similarity of normalized encodings), if its
    similarity reaches `tau`. Ties go to the earliest record."""
    encoding = _check_encoding(trm, encoding, trm.fingerprint.encoding_length)
    similarities = _similarities(trm.normalize(encoding), trm._unary_matrix)
    if similarities is None:
        return None
    best = int(np.argmax(similarities))
    similarity = float(similarities[best])
    if similarity < tau:
        return None
    index = trm._indices(UNARY)[best]
    return LookupResult(trm.records[index].transform, similarity, index)


def lookup_binary(
    trm: Trm, encoding_i: np.ndarray, encoding_j: np.ndarray, tau: float
) -> Optional[LookupResult]:
    """Most similar binary record for the pair, testing the query as given and swapped. An
    orientation of `swapped` means the transformation has to be applied as t(x_j, x_i)."""
    length = trm.fingerprint.encoding_length
    normalized_i = trm.normalize(_check_encoding(trm, encoding_i, length))
    normalized_j = trm.normalize(_check_encoding(trm, encoding_j, length))
    direct = _similarities(np.concatenate([normalized_i, normalized_j]), trm._binary_matrix)
    if direct is None:
        return None
    swapped = _similarities(np.concatenate([normalized_j, normalized_i]), trm._binary_matrix)

    best_direct = int(np.argmax(direct))
    best_swapped = int(np.argmax(swapped))
    if swapped[best_swapped] > direct[best_direct] or (
        swapped[best_swapped] == direct[best_direct] and best_swapped < best_direct
    ):
        best, similarity, orientation = best_swapped, float(swapped[best_swapped]), SWAPPED
    else:
        best, similarity, orientation = best_direct, float(direct[best_direct]), AS_STORED
    if similarity < tau:
        return None
    index = trm._indices(BINARY)[best]
    return LookupResult(trm.records[index].transform, similarity, index, orientation)


def lookup_scaler(trm: Trm, dataset_encoding: np.ndarray) -> LookupResult:
    """Scaler of the most similar dataset encoding, no threshold applies."""
    encoding = _check_encoding(trm, dataset_encoding, trm.fingerprint.n_meta_features)
    if trm._scaler_matrix.shape[0] == 0:
        raise EmptyTrm("the TRM does not contain any scaler record")
    query = trm.normalize(encoding)
    if np.any(query):
        similarities = cosine_similarity(query[None, :], trm._scaler_matrix)[0]
    else:
        similarities = np.zeros(trm._scaler_matrix.shape[0])
    best = int(np.argmax(similarities))
    index = trm._indices(SCALER)[best]
    return LookupResult(trm.records[index].transform, float(similarities[best]), index)
