"""Evaluation - MAE, Degree of Matthew Effect and multi-algorithm comparisons."""
import json
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field

from emotion_core.exceptions import (
    ArtifactIOError,
    ComparisonError,
    ConfigError,
    EmotionCoreError,
    EvaluationError,
    NumericalError,
)
from emotion_core.logging_config import get_logger
from emotion_core.models.dataset import RatingDataset
from emotion_core.models.enums import Algorithm, DMEUsers
from emotion_core.models.factor import TrainConfig
from emotion_core.models.report import EvalReport
from emotion_core.models.stats import ItemStats, PopularityThresholds
from emotion_core.services.factorization import FactorPredictor, Predictor, random_baseline, train_emf, train_mf
from emotion_core.services.ingest import read_delimited, write_frame
from emotion_core.services.item_stats import classify, compute_item_stats
from emotion_core.services.manifest import derive_seed

logger = get_logger("evaluation")

COMPARISON_COLUMNS = ["algorithm", "mae", "dme", "seed", "lambda", "dataset", "top_k"]


class AlgorithmSpec(BaseModel):
    """One comparison entry; ``emotion_weight`` is set for EMF only."""
    algorithm: Algorithm
    emotion_weight: Optional[float] = Field(None, ge=0.0)


class ComparisonConfig(BaseModel):
    """Everything a comparison run needs besides the data."""
    train: TrainConfig = Field(default_factory=TrainConfig)
    thresholds: PopularityThresholds = Field(default_factory=PopularityThresholds)
    top_k: int = Field(default=10, ge=1)
    dme_users: DMEUsers = DMEUsers.TEST
    dataset_id: str = "dataset"


# ==================== Metrics ====================

def mae(predictor: Predictor, test: RatingDataset) -> float:
    """Mean absolute error of the predictor over the test triples."""
    if len(test) == 0:
        raise EvaluationError("Cannot compute MAE on an empty test set")
    predictions = predictor.predict_pairs(test.user_indices, test.item_indices)
    value = float(np.mean(np.abs(test.ratings - predictions)))
    if not np.isfinite(value):
        raise NumericalError("MAE is not finite")
    return value


def _items_by_user(train: RatingDataset) -> list[np.ndarray]:
    order = np.argsort(train.user_indices, kind="stable")
    bounds = np.concatenate([[0], np.cumsum(np.bincount(train.user_indices, minlength=train.n_users))])
    sorted_items = train.item_indices[order]
    return [sorted_items[bounds[u]:bounds[u + 1]] for u in range(train.n_users)]


def exposure_counts(predictor: Predictor, users: np.ndarray, train: RatingDataset, top_k: int) -> np.ndarray:
    """How often each item lands in a user's top-k among the items unseen in train.

    Candidates are ranked by predicted rating, ties by ascending item id.
    Users without unseen items are skipped.
    """
    if top_k < 1:
        raise ConfigError(f"top_k must be >= 1, got {top_k}")
    n_items = train.n_items
    seen_by_user = _items_by_user(train)
    exposures = np.zeros(n_items, dtype=np.int64)
    eligible = 0
    for u in np.unique(np.asarray(users, dtype=np.int64)).tolist():
        seen = seen_by_user[u]
        n_unseen = n_items - len(seen)
        if n_unseen <= 0:
            continue
        scores = np.array(predictor.score_user(u, n_items), dtype=np.float64)
        scores[seen] = -np.inf
        # Index order equals ascending external id, so a stable sort breaks ties by id
        top = np.argsort(-scores, kind="stable")[: min(top_k, n_unseen)]
        exposures[top] += 1
        eligible += 1
    if eligible == 0:
        raise EvaluationError("No user has an unseen item to recommend")
    return exposures


def matthew_effect_slope(exposures: np.ndarray) -> float:
    """|slope| of the least-squares line through (log rank, log exposure)."""
    counts = np.sort(np.asarray(exposures)[np.asarray(exposures) > 0])[::-1].astype(np.float64)
    if len(counts) < 2:
        return 0.0
    ranks = np.arange(1, len(counts) + 1, dtype=np.float64)
    slope, _ = np.polyfit(np.log(ranks), np.log(counts), 1)
    return float(abs(slope))


def degree_of_matthew_effect(
    predictor: Predictor, test_users: np.ndarray, train: RatingDataset, top_k: int
) -> float:
    """Zipf slope of recommendation exposure across the given users' top-k lists."""
    exposures = exposure_counts(predictor, test_users, train, top_k)
    value = matthew_effect_slope(exposures)
    logger.debug(f"DME over {int((exposures > 0).sum())} exposed items: {value:.6f}")
    return value


def dme_population(train: RatingDataset, test: RatingDataset, mode: DMEUsers) -> np.ndarray:
    if mode == DMEUsers.ALL:
        return np.unique(np.concatenate([train.user_indices, test.user_indices]))
    return np.unique(test.user_indices)


# ==================== Comparison ====================

def expand_algorithms(
    algorithms: list[Algorithm], lambda_grid: Optional[list[float]], default_lambda: float
) -> list[AlgorithmSpec]:
    """One spec per algorithm; EMF expands to one spec per grid value."""
    specs = []
    for algorithm in algorithms:
        if algorithm == Algorithm.EMF:
            for value in (lambda_grid or [default_lambda]):
                specs.append(AlgorithmSpec(algorithm=algorithm, emotion_weight=value))
        else:
            specs.append(AlgorithmSpec(algorithm=algorithm))
    return specs


def build_predictor(
    spec: AlgorithmSpec, train: RatingDataset, stats: Optional[ItemStats], config: TrainConfig
) -> Predictor:
    if spec.algorithm == Algorithm.MF:
        return FactorPredictor(train_mf(train, config))
    if spec.algorithm == Algorithm.EMF:
        weight = config.emotion_weight if spec.emotion_weight is None else spec.emotion_weight
        return FactorPredictor(train_emf(train, stats, config.model_copy(update={"emotion_weight": weight})))
    return random_baseline(derive_seed(config.seed, "random-baseline"), train.max_rating)


def evaluate_predictor(
    name: str,
    predictor: Predictor,
    train: RatingDataset,
    test: RatingDataset,
    config: ComparisonConfig,
    emotion_weight: Optional[float] = None,
) -> EvalReport:
    users = dme_population(train, test, config.dme_users)
    report = EvalReport(
        algorithm=name,
        mae=mae(predictor, test),
        dme=degree_of_matthew_effect(predictor, users, train, config.top_k),
        top_k=config.top_k,
        seed=config.train.seed,
        dataset_id=config.dataset_id,
        emotion_weight=emotion_weight,
        config_snapshot=json.dumps(
            {
                "train": config.train.model_copy(
                    update={"emotion_weight": emotion_weight or 0.0}
                ).model_dump(),
                "thresholds": config.thresholds.model_dump(),
                "top_k": config.top_k,
                "dme_users": config.dme_users.value,
            },
            sort_keys=True,
        ),
    )
    logger.info(f"{report.label}: MAE={report.mae:.4f} DME={report.dme:.4f}")
    return report


def run_comparison(
    train: RatingDataset,
    test: RatingDataset,
    algorithm_list: list[AlgorithmSpec],
    config: ComparisonConfig,
) -> list[EvalReport]:
    """Train or instantiate each algorithm with the same seed and evaluate it.

    A failing algorithm does not stop the others; failures are raised together
    at the end as a ComparisonError carrying the reports that did complete.
    """
    if train.user_ids != test.user_ids or train.item_ids != test.item_ids:
        raise ConfigError("Train and test splits must share id maps")

    stats = None
    if any(spec.algorithm == Algorithm.EMF for spec in algorithm_list):
        stats = classify(compute_item_stats(train), config.thresholds)

    reports: list[EvalReport] = []
    failures: dict[str, EmotionCoreError] = {}
    for spec in algorithm_list:
        name = spec.algorithm.value
        label = name if spec.emotion_weight is None else f"{name}(lambda={spec.emotion_weight:g})"
        try:
            predictor = build_predictor(spec, train, stats, config.train)
            reports.append(evaluate_predictor(name, predictor, train, test, config, spec.emotion_weight))
        except EmotionCoreError as e:
            logger.error(f"{label} failed: {e.message}")
            failures[label] = e

    if failures:
        raise ComparisonError(failures, reports)
    return reports


# ==================== Report files ====================

def _comparison_frame(reports: list[EvalReport]) -> pd.DataFrame:
    return pd.DataFrame(
        [
            {
                "algorithm": r.algorithm,
                "mae": r.mae,
                "dme": r.dme,
                "seed": r.seed,
                "lambda": "" if r.emotion_weight is None else r.emotion_weight,
                "dataset": r.dataset_id,
                "top_k": r.top_k,
            }
            for r in reports
        ],
        columns=COMPARISON_COLUMNS,
    )


def write_comparison_csv(reports: list[EvalReport], path: Path) -> Path:
    """``algorithm,mae,dme,seed,lambda,dataset,top_k``; lambda is blank for non-EMF rows."""
    return write_frame(_comparison_frame(reports), path)


def write_comparison_jsonl(reports: list[EvalReport], path: Path) -> Path:
    """One JSON object per report, including the configuration snapshot."""
    lines = [json.dumps(r.model_dump(), sort_keys=True) for r in reports]
    out_path = Path(path)
    try:
        out_path.parent.mkdir(parents=True, exist_ok=True)
        out_path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    except OSError as e:
        raise ArtifactIOError(f"Cannot write {out_path}: {e.strerror or e}") from e
    return out_path


def read_comparison_csv(path: Path) -> list[EvalReport]:
    """Load reports back from a comparison CSV (for re-rendering)."""
    frame = read_delimited(path, ",")
    missing = [c for c in COMPARISON_COLUMNS if c not in frame.columns]
    if missing:
        raise ConfigError(f"{path}: missing comparison column(s) {missing}")
    return [
        EvalReport(
            algorithm=row["algorithm"],
            mae=float(row["mae"]),
            dme=float(row["dme"]),
            seed=int(row["seed"]),
            emotion_weight=float(row["lambda"]) if row["lambda"] else None,
            dataset_id=row["dataset"],
            top_k=int(row["top_k"]),
        )
        for row in frame.to_dict("records")
    ]
