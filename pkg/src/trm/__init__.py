from .store import (
    AS_STORED,
    SWAPPED,
    LookupResult,
    Trm,
    TrmFingerprint,
    TrmRecord,
    compute_norm_stats,
    lookup_binary,
    lookup_scaler,
    lookup_unary,
)
from .training import records_for_dataset, train_trm
