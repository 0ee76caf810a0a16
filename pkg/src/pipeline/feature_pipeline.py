import dataclasses
import math
import warnings
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.causal import (
    CausalRanking,
    DagOptions,
    WeightedDAG,
    export_dot,
    fit_dag,
    rank_features,
    select_top,
)
from src.dataset import Dataset
from src.errors import BadThreshold, CapExceededWarning, ConfigMismatch, LengthMismatch
from src.metafeatures import EncodingConfig, encode_dataset, encode_features
from src.transforms import (
    FittedScaler,
    TransformExpr,
    apply_binary,
    apply_scaler,
    apply_unary,
    eval_expr,
)
from src.transforms.registry import FLOAT_MAX
from src.trm import Trm, TrmFingerprint, lookup_binary, lookup_scaler, lookup_unary
from src.utils.logging_utils import get_pylogger

logger = get_pylogger(__name__)

MAX_ABS_CORRELATION = 0.999


@dataclasses.dataclass(frozen=True)
class PipelineConfig:
    """Args:
    depth: number of generation rounds, i.e. the maximal transformation order reached by
        chaining unary lookups.
    select: fraction of the original features kept by the causal selection.
    tau: minimal cosine similarity of a TRM lookup. Values above 1 disable generation.
    cap_factor: at most ceil(cap_factor * n_original) features are generated.
    """

    depth: int = 2
    select: float = 0.8
    tau: float = 0.5
    cap_factor: float = 2.0

    def __post_init__(self) -> None:
        if self.depth < 1:
            raise BadThreshold(f"depth must be at least 1, got {self.depth}")
        if not 0.0 < self.select <= 1.0:
            raise BadThreshold(f"select must be in (0, 1], got {self.select}")
        if not self.cap_factor > 0.0:
            raise BadThreshold(f"cap_factor must be positive, got {self.cap_factor}")
        if not math.isfinite(self.tau):
            raise BadThreshold(f"tau must be finite, got {self.tau}")

    def cap(self, n_original: int) -> int:
        # rounding guards against products like 0.3 * 10 = 3.0000000000000004
        return math.ceil(round(self.cap_factor * n_original, 9))


@dataclasses.dataclass(frozen=True, eq=False)
class GeneratedFeature:
    expr: TransformExpr
    values: np.ndarray
    round: int
    similarity: float
    record_index: int
    orientation: str

    @property
    def name(self) -> str:
        return str(self.expr)

    def lineage(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "order": self.expr.order,
            "round": self.round,
            "transform": str(self.expr.transform),
            "similarity": self.similarity,
            "record_index": self.record_index,
            "orientation": self.orientation,
        }


@dataclasses.dataclass(frozen=True, eq=False)
class EngineeredDataset:
    """Result of the feature engineering: the causally selected original columns (`base`),
    the generated columns and the fitted scaler that maps both to the final matrix."""

    base: Dataset
    generated: Tuple[GeneratedFeature, ...]
    scaler: FittedScaler
    scaler_similarity: float
    dag: WeightedDAG
    ranking: CausalRanking
    selected: Tuple[int, ...]
    warnings: Tuple[str, ...] = ()
    config: Optional[PipelineConfig] = None

    @property
    def feature_names(self) -> List[str]:
        return self.base.feature_names + [feature.name for feature in self.generated]

    @property
    def n_generated(self) -> int:
        return len(self.generated)

    def unscaled_matrix(self) -> np.ndarray:
        if not self.generated:
            return np.array(self.base.X, dtype=float)
        columns = np.column_stack([feature.values for feature in self.generated])
        return np.hstack([self.base.X, columns])

    def to_dataset(self) -> Dataset:
        """The engineered (scaled) dataset with columns named by their expressions."""
        unscaled = self.base.with_columns(
            [feature.name for feature in self.generated],
            self.unscaled_matrix()[:, self.base.n_features :],
        )
        return unscaled.with_matrix(self.scaler.transform_matrix(unscaled.X))

    def apply_to(self, dataset: Dataset) -> Dataset:
        """Replays the engineering on other instances with the same original columns (e.g. a
        test fold): the same columns are selected, the same expressions evaluated and the
        already fitted scaler is reused."""
        missing = [name for name in self.base.feature_names if name not in dataset.feature_names]
        if missing:
            raise LengthMismatch(f"dataset {dataset.name} lacks the columns {missing}")
        base = dataset.select_columns(
            [dataset.feature_names.index(name) for name in self.base.feature_names]
        )
        if self.generated:
            values = np.column_stack([eval_expr(feature.expr, base) for feature in self.generated])
            base = base.with_columns([feature.name for feature in self.generated], values)
        return base.with_matrix(self.scaler.transform_matrix(base.X))

    def lineage(self) -> Dict[str, Any]:
        names = self.dag.node_names
        return {
            "dataset": self.base.name,
            "n_original": self.dag.n_features,
            "selected": [
                {"feature": names[index], "magnitude": magnitude, "rank": rank}
                for rank, (index, magnitude) in enumerate(self.ranking.entries)
                if index in self.selected
            ],
            "ranking": [
                {"feature": names[index], "magnitude": magnitude}
                for index, magnitude in self.ranking.entries
            ],
            "generated": [feature.lineage() for feature in self.generated],
            "scaler": {
                "transform": str(self.scaler.transform),
                "similarity": self.scaler_similarity,
            },
            "warnings": list(self.warnings),
            "config": None if self.config is None else dataclasses.asdict(self.config),
        }

    def causal_graph_dot(self) -> str:
        return export_dot(self.dag, highlight=self.selected)


def dedup_check(candidate: np.ndarray, existing: Sequence[np.ndarray]) -> bool:
    """Accepts a generated column unless it is constant, duplicates an existing column or is
    almost perfectly correlated (|r| > 0.999) with one.

    >>> dedup_check(np.array([1.0, 2.0, 4.0]), [np.array([2.0, 4.0, 8.0])])
    False
    """
    candidate = np.asarray(candidate, dtype=float)
    if np.ptp(candidate) == 0.0:
        return False
    # scaling by the largest magnitude keeps the moments finite, correlations are unaffected
    scaled = candidate / np.max(np.abs(candidate))
    for column in existing:
        column = np.asarray(column, dtype=float)
        if column.shape != candidate.shape:
            raise LengthMismatch(
                f"candidate has shape {candidate.shape}, existing column {column.shape}"
            )
        if np.array_equal(column, candidate):
            return False
        if np.ptp(column) == 0.0:
            continue
        with np.errstate(invalid="ignore", divide="ignore"):
            r = np.corrcoef(scaled, column / np.max(np.abs(column)))[0, 1]
        if np.isfinite(r) and abs(r) > MAX_ABS_CORRELATION:
            return False
    return True


def check_compatible(trm: Trm, encoding: EncodingConfig) -> None:
    expected = TrmFingerprint.from_encoding_config(encoding)
    if trm.fingerprint != expected:
        raise ConfigMismatch(
            f"the TRM was trained with {trm.fingerprint}, the current configuration requires "
            f"{expected}"
        )


class _Generation:
    """Mutable state of the generation rounds."""

    def __init__(self, base: Dataset, cap: int):
        self.base = base
        self.cap = cap
        self.exprs: List[TransformExpr] = [TransformExpr.leaf(n) for n in base.feature_names]
        self.columns: List[np.ndarray] = [np.array(base.X[:, j]) for j in range(base.n_features)]
        self.generated: List[GeneratedFeature] = []
        self.warnings: List[str] = []

    @property
    def capped(self) -> bool:
        return len(self.generated) >= self.cap

    def dataset(self) -> Dataset:
        if not self.generated:
            return self.base
        return self.base.with_columns(
            [feature.name for feature in self.generated],
            np.column_stack([feature.values for feature in self.generated]),
        )

    def offer(self, feature: GeneratedFeature) -> bool:
        if self.capped:
            if not self.warnings:
                message = (
                    f"generation stopped at the cap of {self.cap} features for "
                    f"<{self.base.name}>, further recommendations (first: {feature.name}) "
                    "are dropped"
                )
                warnings.warn(message, CapExceededWarning)
                logger.warning(message)
                self.warnings.append(message)
            return False
        # saturated values come from overflowing transformations and can not be scaled
        if np.max(np.abs(feature.values)) >= FLOAT_MAX:
            logger.debug(f"reject saturated feature {feature.name}")
            return False
        if not dedup_check(feature.values, self.columns):
            logger.debug(f"reject duplicate feature {feature.name}")
            return False
        self.exprs.append(feature.expr)
        self.columns.append(feature.values)
        self.generated.append(feature)
        return True


class FeatureEngineeringPipeline:
    """Data transformation driven by a TRM.

    1. causal selection: keep the top `select` fraction of the original features ranked by
       their learned direct effect on the target,
    2. `depth` generation rounds, each one unary lookup per feature followed by one binary
       lookup per feature pair, over the features present at the start of the pass,
    3. scaling of all columns with the scaler of the most similar training dataset.
    """

    def __init__(
        self,
        trm: Trm,
        config: PipelineConfig = PipelineConfig(),
        encoding: EncodingConfig = EncodingConfig(),
        dag_options: DagOptions = DagOptions(),
    ):
        check_compatible(trm, encoding)
        self.trm = trm
        self.config = config
        self.encoding = encoding
        self.dag_options = dag_options

    def causal_selection(self, dataset: Dataset) -> Tuple[WeightedDAG, CausalRanking, List[int]]:
        dag = fit_dag(dataset, self.dag_options)
        ranking = rank_features(dag)
        selected = sorted(select_top(ranking, self.config.select))
        logger.info(
            f"Selected {len(selected)} of {dataset.n_features} features of <{dataset.name}>: "
            f"{[dataset.feature_names[i] for i in selected]}"
        )
        return dag, ranking, selected

    def unary_pass(self, state: _Generation, round_number: int) -> None:
        encodings = encode_features(state.dataset(), self.encoding)
        for i, (expr, column) in enumerate(list(zip(state.exprs, state.columns))):
            result = lookup_unary(self.trm, encodings[i], self.config.tau)
            if result is None:
                continue
            feature = GeneratedFeature(
                expr=TransformExpr(transform=result.transform, children=(expr,)),
                values=apply_unary(result.transform, column),
                round=round_number,
                similarity=result.similarity,
                record_index=result.record_index,
                orientation=result.orientation,
            )
            state.offer(feature)
            if state.capped and state.warnings:
                return

    def binary_pass(self, state: _Generation, round_number: int) -> None:
        encodings = encode_features(state.dataset(), self.encoding)
        exprs, columns = list(state.exprs), list(state.columns)
        for i in range(len(exprs)):
            for j in range(i + 1, len(exprs)):
                result = lookup_binary(self.trm, encodings[i], encodings[j], self.config.tau)
                if result is None:
                    continue
                first, second = (j, i) if result.swapped else (i, j)
                feature = GeneratedFeature(
                    expr=TransformExpr(
                        transform=result.transform, children=(exprs[first], exprs[second])
                    ),
                    values=apply_binary(result.transform, columns[first], columns[second]),
                    round=round_number,
                    similarity=result.similarity,
                    record_index=result.record_index,
                    orientation=result.orientation,
                )
                state.offer(feature)
                if state.capped and state.warnings:
                    return

    def generate(self, base: Dataset, n_original: int) -> _Generation:
        state = _Generation(base, cap=self.config.cap(n_original))
        for round_number in range(1, self.config.depth + 1):
            before = len(state.generated)
            self.unary_pass(state, round_number)
            if not state.warnings:
                self.binary_pass(state, round_number)
            logger.info(
                f"Round {round_number}: generated {len(state.generated) - before} features "
                f"for <{base.name}>"
            )
            if state.warnings:
                break
        return state

    def scale(self, dataset: Dataset) -> Tuple[FittedScaler, float]:
        result = lookup_scaler(self.trm, encode_dataset(dataset))
        _, fitted = apply_scaler(result.transform, dataset.X)
        logger.info(
            f"Scaling <{dataset.name}> with {result.transform} "
            f"(similarity={result.similarity:.4f})"
        )
        return fitted, result.similarity

    def __call__(self, dataset: Dataset) -> EngineeredDataset:
        steps: Dict[str, Callable[[Dict[str, Any]], None]] = {
            "causal_selection": self._causal_selection_step,
            "generation": self._generation_step,
            "scaling": self._scaling_step,
        }
        context: Dict[str, Any] = {"dataset": dataset}
        # call the steps in the order they are provided
        for step_name, step in steps.items():
            logger.info(f"process {step_name} ...")
            step(context)
        return EngineeredDataset(
            base=context["base"],
            generated=tuple(context["state"].generated),
            scaler=context["scaler"],
            scaler_similarity=context["scaler_similarity"],
            dag=context["dag"],
            ranking=context["ranking"],
            selected=tuple(context["selected"]),
            warnings=tuple(context["state"].warnings),
            config=self.config,
        )

    def _causal_selection_step(self, context: Dict[str, Any]) -> None:
        dataset = context["dataset"]
        dag, ranking, selected = self.causal_selection(dataset)
        context.update(dag=dag, ranking=ranking, selected=selected)
        context["base"] = dataset.select_columns(selected)

    def _generation_step(self, context: Dict[str, Any]) -> None:
        context["state"] = self.generate(context["base"], context["dataset"].n_features)

    def _scaling_step(self, context: Dict[str, Any]) -> None:
        fitted, similarity = self.scale(context["state"].dataset())
        context.update(scaler=fitted, scaler_similarity=similarity)


def transform_dataset(
    dataset: Dataset,
    trm: Trm,
    config: PipelineConfig = PipelineConfig(),
    encoding: EncodingConfig = EncodingConfig(),
    dag_options: DagOptions = DagOptions(),
) -> EngineeredDataset:
    """Engineers the features of a preprocessed dataset with the recommendations of `trm`."""
    return FeatureEngineeringPipeline(trm, config, encoding, dag_options)(dataset)