from .dag import (
    CausalRanking,
    DagOptions,
    WeightedDAG,
    acyclicity,
    export_dot,
    fit_dag,
    fit_weights,
    is_acyclic,
    orientation_constraints,
    rank_features,
    select_top,
    structural_hamming_distance,
)
