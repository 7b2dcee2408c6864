"""Item statistics - Score_j, Count_j and the popular/obscure classification."""
import math
from pathlib import Path

import numpy as np
import pandas as pd

from emotion_core.exceptions import DataValidationError, StatsError
from emotion_core.logging_config import get_logger
from emotion_core.models.dataset import RatingDataset
from emotion_core.models.enums import PopularityClass
from emotion_core.models.stats import ItemStats, PopularityThresholds
from emotion_core.services.ingest import write_frame

logger = get_logger("item_stats")


def compute_item_stats(train: RatingDataset) -> ItemStats:
    """Mean rating and rating count per item over the training triples."""
    if len(train) == 0:
        raise DataValidationError("Cannot compute item statistics of an empty dataset")

    count = np.bincount(train.item_indices, minlength=train.n_items).astype(np.int64)
    total = np.bincount(train.item_indices, weights=train.ratings, minlength=train.n_items)
    score = np.full(train.n_items, np.nan)
    rated = count > 0
    score[rated] = total[rated] / count[rated]

    logger.info(f"Item stats: {int(rated.sum())} rated items out of {train.n_items}")
    return ItemStats(score=score, count=count)


def nearest_rank_quantile(values: np.ndarray, q: float) -> float:
    """Upper nearest-rank quantile: the k-th smallest value with k = min(n, floor(q*n) + 1)."""
    ordered = np.sort(np.asarray(values))
    n = len(ordered)
    if n == 0:
        raise StatsError("Quantile of an empty value list")
    k = min(n, math.floor(q * n) + 1)
    return float(ordered[k - 1])


def classify(stats: ItemStats, thresholds: PopularityThresholds) -> ItemStats:
    """Label each rated item Popular (score or count at/above its quantile) or Obscure."""
    rated = stats.rated
    if not rated.any():
        raise StatsError("Cannot classify empty item statistics")

    tau_s = nearest_rank_quantile(stats.score[rated], thresholds.score_quantile)
    tau_c = nearest_rank_quantile(stats.count[rated], thresholds.count_quantile)

    popular = np.zeros(len(stats.count), dtype=bool)
    popular[rated] = (stats.score[rated] >= tau_s) | (stats.count[rated] >= tau_c)
    popular.setflags(write=False)

    n_popular = int(popular.sum())
    logger.info(
        f"Classified {int(rated.sum())} items: {n_popular} popular, {int(rated.sum()) - n_popular} obscure "
        f"(score >= {tau_s:.4f} or count >= {tau_c:g})"
    )
    return stats.model_copy(update={
        "popular": popular,
        "thresholds": thresholds,
        "score_threshold": tau_s,
        "count_threshold": tau_c,
    })


def export_item_stats(stats: ItemStats, item_ids: list[int], path: Path) -> Path:
    """Write ``item_id,score,count,class`` for every rated item."""
    indices = stats.item_indices
    classes = [
        (stats.popularity_class(int(j)) or PopularityClass.OBSCURE).value if stats.is_classified else ""
        for j in indices
    ]
    frame = pd.DataFrame({
        "item_id": np.asarray(item_ids, dtype=np.int64)[indices],
        "score": stats.score[indices],
        "count": stats.count[indices],
        "class": classes,
    })
    return write_frame(frame, path)
