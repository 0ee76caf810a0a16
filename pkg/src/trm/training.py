from typing import List, Sequence

import numpy as np
from joblib import Parallel, delayed

from src.dataset import Dataset
from src.errors import EmptyCorpus
from src.metafeatures import EncodingConfig, encode_features, extract_meta_features
from src.metrics.mic import MicConfig, mic, mic_gain
from src.scaling import recommend_scaler
from src.transforms import (
    BINARY,
    SCALER,
    UNARY,
    apply_binary,
    apply_unary,
    binary_ids,
    unary_ids,
)
from src.trm.store import Trm, TrmFingerprint, TrmRecord
from src.utils.logging_utils import get_pylogger

log = get_pylogger(__name__)


def records_for_dataset(
    dataset: Dataset,
    encoding: EncodingConfig = EncodingConfig(),
    mic_config: MicConfig = MicConfig(),
    gamma: float = 0.05,
) -> List[TrmRecord]:
    """All TRM records contributed by one (preprocessed) dataset: the best unary transformation
    per feature and every binary transformation per feature pair that raise the MIC with the
    labels, followed by one scaler record."""
    meta_features = extract_meta_features(dataset)
    encodings = encode_features(dataset, encoding, meta_features=meta_features)
    baselines = [mic(dataset.X[:, i], dataset.y, mic_config) for i in range(dataset.n_features)]
    names = dataset.feature_names
    records: List[TrmRecord] = []

    for i in range(dataset.n_features):
        x = dataset.X[:, i]
        gains = [
            mic_gain(apply_unary(t, x), x, dataset.y, mic_config, baseline=baselines[i])
            for t in unary_ids()
        ]
        best = int(np.argmax(gains))
        if gains[best] > 0:
            records.append(
                TrmRecord(
                    kind=UNARY,
                    transform=unary_ids()[best],
                    enc_a=tuple(encodings[i]),
                    gain_a=gains[best],
                    source=f"{dataset.name}:{names[i]}",
                )
            )

    for i in range(dataset.n_features):
        for j in range(i + 1, dataset.n_features):
            for t in binary_ids():
                generated = apply_binary(t, dataset.X[:, i], dataset.X[:, j])
                score = mic(generated, dataset.y, mic_config)
                gain_i, gain_j = score - baselines[i], score - baselines[j]
                if gain_i > 0 and gain_j > 0:
                    records.append(
                        TrmRecord(
                            kind=BINARY,
                            transform=t,
                            enc_a=tuple(encodings[i]),
                            enc_b=tuple(encodings[j]),
                            gain_a=gain_i,
                            gain_b=gain_j,
                            source=f"{dataset.name}:{names[i]},{names[j]}",
                        )
                    )

    decision = recommend_scaler(dataset, gamma)
    records.append(
        TrmRecord(
            kind=SCALER,
            transform=decision.transform,
            enc_a=tuple(meta_features),
            source=dataset.name,
        )
    )
    log.info(
        f"Dataset <{dataset.name}> contributes {len(records) - 1} transformation records "
        f"and scaler <{decision.choice}>"
    )
    return records


def train_trm(
    corpus: Sequence[Dataset],
    encoding: EncodingConfig = EncodingConfig(),
    mic_config: MicConfig = MicConfig(),
    gamma: float = 0.05,
    threads: int = 1,
) -> Trm:
    """Trains the transformation recommendation matrix on a corpus of preprocessed datasets.

    Datasets are processed by up to `threads` workers; records keep the corpus order, so the
    result does not depend on `threads`.
    """
    if len(corpus) == 0:
        raise EmptyCorpus("can not train a TRM on an empty corpus")
    log.info(f"Training TRM on {len(corpus)} datasets with {threads} thread(s)")
    per_dataset = Parallel(n_jobs=threads, prefer="threads")(
        delayed(records_for_dataset)(dataset, encoding, mic_config, gamma) for dataset in corpus
    )
    records = [record for dataset_records in per_dataset for record in dataset_records]
    return Trm.from_records(records, TrmFingerprint.from_encoding_config(encoding))
