"""Causal feature selection.

A weighted DAG over the features and the (integer coded) target is learned by least squares
with an L1 penalty under the smooth acyclicity constraint h(W) = tr(exp(W * W)) - d = 0, solved
with an augmented Lagrangian. Features are ranked by the magnitude of their direct edge into the
target, which is a sink.
"""

import dataclasses
import math
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg as slin
import scipy.optimize as sopt

from src.dataset import Dataset
from src.errors import BadThreshold, NonConvergence, NonSquare
from src.utils.logging_utils import get_pylogger

log = get_pylogger(__name__)

# both directions of a pair above this magnitude count as an unresolved 2-cycle
TWO_CYCLE_TOL = 1e-3


@dataclasses.dataclass(frozen=True)
class DagOptions:
    """Args:
    lambda1: L1 penalty on the edge weights.
    omega: edges with |weight| < omega are pruned after the optimization.
    h_tol: the acyclicity constraint is satisfied when h(W) <= h_tol.
    max_outer: maximal number of dual ascent steps.
    rho_growth: factor by which the penalty grows when h does not decrease enough.
    rho_max: the penalty is not increased beyond this value.
    max_inner: iteration cap of each inner L-BFGS-B solve.
    """

    lambda1: float = 0.1
    omega: float = 0.3
    h_tol: float = 1e-8
    max_outer: int = 100
    rho_growth: float = 10.0
    rho_max: float = 1e16
    max_inner: int = 1000


@dataclasses.dataclass(frozen=True, eq=False)
class WeightedDAG:
    """Pruned weighted adjacency matrix, `W[a, b]` is the linear effect of node a on node b. The
    last node is the target."""

    W: np.ndarray
    node_names: Tuple[str, ...]
    omega: float
    h: float = 0.0

    @property
    def target_index(self) -> int:
        return len(self.node_names) - 1

    @property
    def n_features(self) -> int:
        return len(self.node_names) - 1

    def edges(self) -> List[Tuple[str, str, float]]:
        sources, targets = np.nonzero(self.W)
        return [
            (self.node_names[a], self.node_names[b], float(self.W[a, b]))
            for a, b in zip(sources, targets)
        ]


@dataclasses.dataclass(frozen=True)
class CausalRanking:
    """(feature index, effect magnitude) sorted by decreasing magnitude, ties by index."""

    entries: Tuple[Tuple[int, float], ...]

    @property
    def order(self) -> List[int]:
        return [index for index, _ in self.entries]

    def __len__(self) -> int:
        return len(self.entries)


def acyclicity(W: np.ndarray) -> Tuple[float, np.ndarray]:
    """Value and gradient of h(W) = tr(exp(W * W)) - d (elementwise square, matrix
    exponential). h is zero iff the nonzero entries of W form a DAG."""
    W = np.asarray(W, dtype=float)
    if W.ndim != 2 or W.shape[0] != W.shape[1]:
        raise NonSquare(f"acyclicity needs a square matrix, got shape {W.shape}")
    E = slin.expm(W * W)
    h = float(np.trace(E) - W.shape[0])
    return max(h, 0.0), E.T * W * 2


def is_acyclic(W: np.ndarray) -> bool:
    """Topological sort (Kahn) of the graph of nonzero entries of W."""
    adjacency = np.asarray(W) != 0
    in_degree = adjacency.sum(axis=0)
    queue = list(np.flatnonzero(in_degree == 0))
    visited = 0
    while queue:
        node = queue.pop()
        visited += 1
        for child in np.flatnonzero(adjacency[node]):
            in_degree[child] -= 1
            if in_degree[child] == 0:
                queue.append(child)
    return visited == adjacency.shape[0]


def _standardize(Z: np.ndarray) -> np.ndarray:
    centered = Z - Z.mean(axis=0, keepdims=True)
    std = centered.std(axis=0, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        standardized = np.where(std > 0, centered / std, 0.0)
    return np.nan_to_num(standardized)


def fit_weights(
    Z: np.ndarray,
    options: DagOptions = DagOptions(),
    sink: Optional[int] = None,
    forbidden: Iterable[Tuple[int, int]] = (),
    init: Optional[np.ndarray] = None,
) -> Tuple[np.ndarray, float]:
    """Minimizes (1/2n) ||Z - Z W||^2 + lambda1 ||W||_1 subject to h(W) = 0 by the augmented
    Lagrangian method. Node `sink` (if given) has no outgoing edges and the `forbidden` entries
    (a, b) stay zero in every iterate. `init` is the starting point (default zero). Returns the
    unpruned W and its acyclicity value."""
    n, d = Z.shape
    forbidden = set(forbidden)

    def _adj(w: np.ndarray) -> np.ndarray:
        return (w[: d * d] - w[d * d :]).reshape([d, d])

    def _func(w: np.ndarray) -> Tuple[float, np.ndarray]:
        W = _adj(w)
        R = Z - Z @ W
        loss = 0.5 / n * (R**2).sum()
        G_loss = -1.0 / n * Z.T @ R
        h, G_h = acyclicity(W)
        objective = loss + 0.5 * rho * h * h + alpha * h + options.lambda1 * w.sum()
        G_smooth = G_loss + (rho * h + alpha) * G_h
        gradient = np.concatenate((G_smooth + options.lambda1, -G_smooth + options.lambda1))
        return objective, gradient

    def _bound(i: int, j: int) -> Tuple[float, Optional[float]]:
        if i == j or i == sink or (i, j) in forbidden:
            return (0.0, 0.0)
        return (0.0, None)

    bounds = [_bound(i, j) for _ in range(2) for i in range(d) for j in range(d)]
    if init is None:
        w_est = np.zeros(2 * d * d)
    else:
        W0 = np.array(init, dtype=float)
        for i, j in forbidden:
            W0[i, j] = 0.0
        if sink is not None:
            W0[sink] = 0.0
        np.fill_diagonal(W0, 0.0)
        w_est = np.concatenate((np.maximum(W0, 0.0).ravel(), np.maximum(-W0, 0.0).ravel()))
    rho, alpha, h = 1.0, 0.0, np.inf
    for step in range(options.max_outer):
        w_new, h_new = w_est, h
        while rho < options.rho_max:
            solution = sopt.minimize(
                _func,
                w_est,
                method="L-BFGS-B",
                jac=True,
                bounds=bounds,
                options={"maxiter": options.max_inner},
            )
            w_new = solution.x
            h_new, _ = acyclicity(_adj(w_new))
            if h_new > 0.25 * h:
                rho *= options.rho_growth
            else:
                break
        w_est, h = w_new, h_new
        alpha += rho * h
        log.debug(f"dual ascent step {step}: <h={h:.3e}> <rho={rho:.1e}>")
        if h <= options.h_tol or rho >= options.rho_max:
            break
    return _adj(w_est), float(h)


def orientation_constraints(
    W: np.ndarray, variances: Sequence[float], tol: float = TWO_CYCLE_TOL
) -> List[Tuple[int, int]]:
    """Entries to forbid so that every 2-cycle of W (both |W[a, b]| and |W[b, a]| above `tol`)
    keeps only the edge from the node with the lower raw variance to the one with the higher
    variance, ties in favour of the lower index.

    >>> orientation_constraints(np.array([[0.0, 0.01], [0.01, 0.0]]), [4.0, 1.0])
    [(0, 1)]
    """
    W = np.asarray(W)
    constraints = []
    for a in range(W.shape[0]):
        for b in range(a + 1, W.shape[0]):
            if abs(W[a, b]) > tol and abs(W[b, a]) > tol:
                constraints.append((b, a) if variances[a] <= variances[b] else (a, b))
    return constraints


def fit_dag(dataset: Dataset, options: DagOptions = DagOptions()) -> WeightedDAG:
    """Learns the weighted DAG over the (standardized) features and the integer coded target,
    which is constrained to be a sink. Edges with |weight| < omega are pruned.

    On standardized data both directions of a strongly dependent pair fit equally well, and the
    optimization can end in a 2-cycle of two small weights that the pruning removes entirely.
    Such pairs are oriented by `orientation_constraints` (raw variances) and the weights refit
    until no new 2-cycle remains.

    Raises NonConvergence (carrying the last iterate) if the constraint stays above tolerance
    and the pruned graph still contains a cycle.
    """
    raw = np.column_stack([dataset.X, dataset.y.astype(float)])
    Z = _standardize(raw)
    target = Z.shape[1] - 1
    W, h = fit_weights(Z, options, sink=target)
    variances = raw.var(axis=0)
    forbidden: List[Tuple[int, int]] = []
    while True:
        new = [entry for entry in orientation_constraints(W, variances) if entry not in forbidden]
        if not new:
            break
        forbidden.extend(new)
        log.debug(f"orienting {len(new)} 2-cycle(s) of <{dataset.name}>, refitting")
        W, h = fit_weights(Z, options, sink=target, forbidden=forbidden, init=W)
    pruned = np.where(np.abs(W) < options.omega, 0.0, W)
    if h > options.h_tol:
        if not is_acyclic(pruned):
            raise NonConvergence(
                f"acyclicity constraint did not converge for <{dataset.name}> (h={h:.3e})",
                last_iterate=W,
                h=h,
            )
        log.warning(
            f"acyclicity constraint above tolerance for <{dataset.name}> (h={h:.3e}), "
            f"but the pruned graph is acyclic"
        )
    dag = WeightedDAG(
        W=pruned,
        node_names=tuple(dataset.feature_names) + (dataset.target_name,),
        omega=options.omega,
        h=h,
    )
    log.info(f"Learned causal graph for <{dataset.name}> with {len(dag.edges())} edges")
    return dag


def rank_features(dag: WeightedDAG) -> CausalRanking:
    """Ranks the features by the magnitude of their direct edge into the target."""
    magnitudes = np.abs(dag.W[: dag.n_features, dag.target_index])
    order = sorted(range(dag.n_features), key=lambda i: (-magnitudes[i], i))
    return CausalRanking(entries=tuple((i, float(magnitudes[i])) for i in order))


def select_top(ranking: CausalRanking, select: float) -> List[int]:
    """The first ceil(select * n_features) ranked features (at least one).

    >>> select_top(CausalRanking(entries=tuple((i, 0.0) for i in range(10))), 0.3)
    [0, 1, 2]
    """
    if not 0.0 < select <= 1.0:
        raise BadThreshold(f"select must be in (0, 1], got {select}")
    # rounding guards against products like 0.3 * 10 = 3.0000000000000004
    k = max(1, math.ceil(round(select * len(ranking), 9)))
    return ranking.order[:k]


def structural_hamming_distance(true_W: np.ndarray, estimated_W: np.ndarray) -> int:
    """Number of node pairs whose connection differs (a missing, extra or reversed edge counts
    once)."""
    true_edges = np.asarray(true_W) != 0
    estimated_edges = np.asarray(estimated_W) != 0
    if true_edges.shape != estimated_edges.shape:
        raise NonSquare("graphs must have the same shape")
    distance = 0
    d = true_edges.shape[0]
    for a in range(d):
        for b in range(a + 1, d):
            true_state = (true_edges[a, b], true_edges[b, a])
            estimated_state = (estimated_edges[a, b], estimated_edges[b, a])
            distance += int(true_state != estimated_state)
    return distance


def _dot_id(name: str) -> str:
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(dag: WeightedDAG, highlight: Sequence[int] = ()) -> str:
    """DOT representation of the pruned graph, selected features (`highlight`) are filled."""
    lines = ["digraph causal_graph {"]
    for index, name in enumerate(dag.node_names):
        attributes = []
        if index == dag.target_index:
            attributes.append("shape=doublecircle")
        if index in highlight:
            attributes.append("style=filled")
        suffix = f" [{', '.join(attributes)}]" if attributes else ""
        lines.append(f"  {_dot_id(name)}{suffix};")
    for source, target, weight in dag.edges():
        lines.append(f'  {_dot_id(source)} -> {_dot_id(target)} [label="{weight:.3f}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
