from .meta_features import (
    META_FEATURE_NAMES,
    EncodingConfig,
    encode_dataset,
    encode_feature,
    encode_features,
    extract_meta_features,
    feature_histogram,
)
