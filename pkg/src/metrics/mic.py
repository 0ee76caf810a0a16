"""Maximal information coefficient between two variables.

The estimator follows the usual approximation scheme: one axis is equipartitioned, the cuts on
the other axis are optimized by dynamic programming over clumps of consecutive points, and both
orientations are evaluated. All candidate cuts depend only on the ordering of the values (ties
broken by input order), so the score is invariant under strictly increasing maps.
"""

import dataclasses
import itertools
import math
from typing import Dict, Optional, Tuple

import numpy as np
from sklearn.metrics import mutual_info_score

from src.errors import (
    BadThreshold,
    LengthMismatch,
    NonFiniteTransformOutput,
    TooFewSamples,
    TooLarge,
)

MIN_SAMPLES = 4
MAX_ORACLE_SAMPLES = 12


@dataclasses.dataclass(frozen=True)
class MicConfig:
    """Args:
    alpha: grid budget exponent, grids with kx * ky <= max(n ** alpha, 4) are considered.
    c: at most c * kx clumps are used as candidate cut positions when optimizing kx columns.
    """

    alpha: float = 0.6
    c: int = 15

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha <= 1.0:
            raise BadThreshold(f"mic alpha must be in (0, 1], got {self.alpha}")
        if self.c < 1:
            raise BadThreshold(f"mic c must be at least 1, got {self.c}")

    def grid_budget(self, n: int) -> float:
        return max(n**self.alpha, 4.0)


def _check_inputs(x: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.shape != y.shape:
        raise LengthMismatch(f"mic inputs differ in length: {x.size} vs {y.size}")
    if x.size < MIN_SAMPLES:
        raise TooFewSamples(f"mic needs at least {MIN_SAMPLES} samples, got {x.size}")
    if not (np.isfinite(x).all() and np.isfinite(y).all()):
        raise NonFiniteTransformOutput("mic inputs contain non-finite values")
    return x, y


def _equipartition(values: np.ndarray, k: int) -> Tuple[np.ndarray, int]:
    """Assigns every point to one of at most `k` consecutive rows of (roughly) equal size along
    the order of `values`. Equal values always share a row. Returns (row ids, number of rows)."""
    n = values.size
    order = np.argsort(values, kind="stable")
    sorted_values = values[order]
    starts = np.flatnonzero(np.r_[True, sorted_values[1:] != sorted_values[:-1]])
    sizes = np.diff(np.r_[starts, n])

    assignment = np.empty(n, dtype=int)
    row, filled, target = 0, 0, n / k
    for start, size in zip(starts, sizes):
        if filled > 0 and row < k - 1 and abs(filled + size - target) >= abs(filled - target):
            row += 1
            filled = 0
            target = (n - start) / (k - row)
        assignment[order[start : start + size]] = row
        filled += size
    return assignment, row + 1


def _clump_edges(sorted_values: np.ndarray, sorted_rows: np.ndarray) -> np.ndarray:
    """Positions (in sorted order) at which a column boundary may be placed. Consecutive points
    with the same row never need to be separated and tied values can not be separated."""
    n = sorted_values.size
    tie_start = np.r_[True, sorted_values[1:] != sorted_values[:-1]]
    group_starts = np.flatnonzero(tie_start)
    group_ids = np.cumsum(tie_start) - 1
    row_min = np.minimum.reduceat(sorted_rows, group_starts)
    row_max = np.maximum.reduceat(sorted_rows, group_starts)
    # tie groups spanning several rows get a label of their own
    group_labels = np.where(row_min == row_max, row_min, -1 - np.arange(group_starts.size))
    labels = group_labels[group_ids]
    boundary = tie_start.copy()
    boundary[1:] &= labels[1:] != labels[:-1]
    boundary[0] = True
    return np.r_[np.flatnonzero(boundary), n]


def _superclump_edges(edges: np.ndarray, max_clumps: int) -> np.ndarray:
    """Merges neighbouring clumps into at most `max_clumps` clumps of roughly equal mass."""
    n_clumps = edges.size - 1
    if n_clumps <= max_clumps:
        return edges
    clump_of_point = np.repeat(np.arange(n_clumps), np.diff(edges))
    merged, _ = _equipartition(clump_of_point.astype(float), max_clumps)
    change = np.flatnonzero(merged[1:] != merged[:-1]) + 1
    return np.r_[0, change, clump_of_point.size]


def _optimize_axis(
    free_values: np.ndarray, rows: np.ndarray, n_rows: int, max_cols: int, c: int
) -> np.ndarray:
    """For l = 0..max_cols, the largest mutual information (nats) between the fixed row
    partition and any partition of the free axis into at most l columns."""
    n = free_values.size
    order = np.argsort(free_values, kind="stable")
    sorted_rows = rows[order]
    edges = _clump_edges(free_values[order], sorted_rows)
    edges = _superclump_edges(edges, c * max_cols)
    k = edges.size - 1

    one_hot = np.zeros((n + 1, n_rows))
    one_hot[np.arange(1, n + 1), sorted_rows] = 1.0
    cumulative = np.cumsum(one_hot, axis=0)[edges]

    row_totals = cumulative[-1]
    p_rows = row_totals[row_totals > 0] / n
    h_rows = float(-(p_rows * np.log(p_rows)).sum())

    # best[l, t]: max over partitions of the first t clumps into l columns of
    # -sum_columns p(column) * H(rows | column)
    best = np.full((max_cols + 1, k + 1), -np.inf)
    best[0, 0] = 0.0
    for t in range(1, k + 1):
        counts = cumulative[t] - cumulative[:t]
        totals = counts.sum(axis=1, keepdims=True)
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.where(counts > 0, counts * np.log(counts / totals), 0.0)
        column_scores = terms.sum(axis=1) / n
        best[1:, t] = (best[:-1, :t] + column_scores[None, :]).max(axis=1)

    mutual_information = np.maximum.accumulate(best[:, k]) + h_rows
    mutual_information[0] = 0.0
    return np.clip(mutual_information, 0.0, None)


def _max_normalized(fixed: np.ndarray, free: np.ndarray, budget: float, c: int) -> float:
    """Equipartitions `fixed` into ky rows and optimizes the cuts on `free` for every ky."""
    score = 0.0
    cache: Dict[bytes, np.ndarray] = {}
    for ky in range(2, int(budget // 2) + 1):
        max_cols = int(budget // ky)
        if max_cols < 2:
            break
        rows, n_rows = _equipartition(fixed, ky)
        if n_rows < 2:
            continue
        key = rows.tobytes()
        if key not in cache or cache[key].size - 1 < max_cols:
            cache[key] = _optimize_axis(free, rows, n_rows, max_cols, c)
        mutual_information = cache[key]
        for kx in range(2, max_cols + 1):
            score = max(score, mutual_information[kx] / math.log(min(kx, ky)))
    return score


def mic(x: np.ndarray, y: np.ndarray, config: MicConfig = MicConfig()) -> float:
    """Maximal information coefficient in [0, 1]. Returns 0 if x or y is constant.

    >>> round(mic(np.arange(50), np.arange(50)), 9)
    1.0
    """
    x, y = _check_inputs(x, y)
    if np.ptp(x) == 0.0 or np.ptp(y) == 0.0:
        return 0.0
    budget = config.grid_budget(x.size)
    score = max(
        _max_normalized(y, x, budget, config.c),
        _max_normalized(x, y, budget, config.c),
    )
    return float(min(max(score, 0.0), 1.0))


def _cut_candidates(values: np.ndarray) -> np.ndarray:
    distinct = np.unique(values)
    return (distinct[1:] + distinct[:-1]) / 2.0


def mic_exact_oracle(x: np.ndarray, y: np.ndarray, config: MicConfig = MicConfig()) -> float:
    """Exact maximum of the normalized mutual information over all grids within the budget,
    found by enumerating every placement of cuts on both axes. Exponential, so only available
    for at most 12 samples."""
    x, y = _check_inputs(x, y)
    if x.size > MAX_ORACLE_SAMPLES:
        raise TooLarge(f"the exact oracle supports at most {MAX_ORACLE_SAMPLES} samples")
    if np.ptp(x) == 0.0 or np.ptp(y) == 0.0:
        return 0.0
    budget = config.grid_budget(x.size)
    x_cuts, y_cuts = _cut_candidates(x), _cut_candidates(y)

    score = 0.0
    for n_cols in range(2, min(int(budget // 2), x_cuts.size + 1) + 1):
        for cols in itertools.combinations(x_cuts, n_cols - 1):
            columns = np.searchsorted(np.asarray(cols), x)
            max_rows = min(int(budget // n_cols), y_cuts.size + 1)
            for n_rows in range(2, max_rows + 1):
                for cuts in itertools.combinations(y_cuts, n_rows - 1):
                    rows = np.searchsorted(np.asarray(cuts), y)
                    mutual_information = mutual_info_score(columns, rows)
                    score = max(score, mutual_information / math.log(min(n_cols, n_rows)))
    return float(min(score, 1.0))


def mic_gain(
    transformed: np.ndarray,
    x: np.ndarray,
    y: np.ndarray,
    config: MicConfig = MicConfig(),
    baseline: Optional[float] = None,
) -> float:
    """MIC of the transformed feature with the labels minus MIC of the original feature. Pass
    `baseline` to reuse an already computed mic(x, y)."""
    transformed = np.asarray(transformed, dtype=float)
    if not np.isfinite(transformed).all():
        raise NonFiniteTransformOutput("transformed feature contains non-finite values")
    if baseline is None:
        baseline = mic(x, y, config)
    return mic(transformed, y, config) - baseline
