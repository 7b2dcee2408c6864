"""Emotional Score - per-(user, item) emotion, the dense ES matrix and item rankings.

A user who dislikes a popular item, or likes an obscure one, is emotionally
biased. For a Popular item ES = (1/r) / (score * count); for an Obscure item
ES = r / (score * count). Analyses use the min-max normalized log of ES.
"""
from collections import Counter
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd

from emotion_core.exceptions import ConfigError, DataValidationError, StatsError
from emotion_core.logging_config import get_logger
from emotion_core.models.dataset import ItemCatalog, RatingDataset
from emotion_core.models.emotion import EmotionalItemRanking, EmotionMatrix, RankedItem, UserEmotion
from emotion_core.models.enums import ESSource, PopularityClass
from emotion_core.models.stats import ItemStats
from emotion_core.services.ingest import write_frame

logger = get_logger("emotion_score")

# Normalized value of every observed cell when all log-ES values coincide
DEGENERATE_NORMALIZED = 0.5


def es_formula(rating: float, score: float, count: float, popular: bool) -> float:
    """Emotional Score of one rating given the item's score, count and class."""
    if popular:
        return (1.0 / rating) / (score * count)
    return rating / (score * count)


def emotional_score(rating: float, stats: ItemStats, item_index: int) -> float:
    """Emotional Score of ``rating`` on item ``item_index``.

    The class indicator selects the reciprocal branch for Popular items.
    """
    if not rating > 0:
        raise DataValidationError(f"Emotional Score undefined for rating {rating!r} (must be > 0)")
    if item_index not in stats:
        raise StatsError(f"No statistics for item index {item_index}")
    item_class = stats.popularity_class(item_index)
    if item_class is None:
        raise StatsError(f"Item index {item_index} has no popularity class")
    return es_formula(
        rating,
        float(stats.score[item_index]),
        float(stats.count[item_index]),
        item_class == PopularityClass.POPULAR,
    )


def min_max_log(raw: np.ndarray) -> np.ndarray:
    """Min-max scale log(raw) to [0, 1]; a zero range maps every value to 0.5."""
    logs = np.log(raw)
    if len(logs) == 0:
        return logs
    lo, hi = logs.min(), logs.max()
    if hi == lo:
        return np.full_like(logs, DEGENERATE_NORMALIZED)
    return (logs - lo) / (hi - lo)


def build_emotion_matrix(train: RatingDataset, stats: ItemStats) -> EmotionMatrix:
    """Raw ES for every observed triple plus the dense normalized N x M matrix."""
    if not stats.is_classified:
        raise StatsError("Item statistics must be classified before building the ES matrix")
    users, items, ratings = train.user_indices, train.item_indices, train.ratings
    if len(items) and not (stats.count[items] > 0).all():
        missing = int(items[stats.count[items] == 0][0])
        raise StatsError(f"No statistics for item index {missing}")

    denominator = stats.score[items] * stats.count[items]
    raw = np.where(stats.popular[items], (1.0 / ratings) / denominator, ratings / denominator)
    normalized_observed = min_max_log(raw)

    dense = np.zeros((train.n_users, train.n_items), dtype=np.float64)
    dense[users, items] = normalized_observed

    for array in (raw, normalized_observed, dense):
        array.setflags(write=False)

    logger.info(
        f"ES matrix {train.n_users}x{train.n_items}: {len(raw)} observed cells, "
        f"raw ES range [{raw.min() if len(raw) else 0:.3g}, {raw.max() if len(raw) else 0:.3g}]"
    )
    return EmotionMatrix(
        user_indices=users,
        item_indices=items,
        raw=raw,
        normalized_observed=normalized_observed,
        normalized=dense,
        user_ids=train.user_ids,
        item_ids=train.item_ids,
        thresholds_used=stats.thresholds,
    )


def item_mean_es(matrix: EmotionMatrix, source: ESSource = ESSource.NORMALIZED) -> tuple[np.ndarray, np.ndarray]:
    """Per-item mean ES over observed cells, and the observation counts."""
    n_items = matrix.shape[1]
    values = matrix.observed_values(source)
    counts = np.bincount(matrix.item_indices, minlength=n_items)
    sums = np.bincount(matrix.item_indices, weights=values, minlength=n_items)
    means = np.zeros(n_items)
    seen = counts > 0
    means[seen] = sums[seen] / counts[seen]
    return means, counts


def rank_emotional_items(
    matrix: EmotionMatrix,
    catalog: Optional[ItemCatalog],
    k: int,
    source: ESSource = ESSource.NORMALIZED,
) -> EmotionalItemRanking:
    """Top-k items by mean Emotional Score, ties by ascending external item id."""
    if k <= 0:
        raise ConfigError(f"Ranking size must be positive, got {k}")

    means, counts = item_mean_es(matrix, source)
    candidates = np.flatnonzero(counts > 0)
    external = np.asarray(matrix.item_ids, dtype=np.int64)[candidates]
    order = candidates[np.lexsort((external, -means[candidates]))][:k]

    ranked = []
    for j in order.tolist():
        entry = catalog.get(j) if catalog else None
        ranked.append(RankedItem(
            item_index=j,
            item_id=matrix.item_ids[j],
            mean_es=float(means[j]),
            observations=int(counts[j]),
            title=entry.title if entry else None,
            year=entry.year if entry else None,
            genres=entry.genres if entry else [],
        ))
    return EmotionalItemRanking(items=ranked, source=source)


def user_emotion_profile(matrix: EmotionMatrix, source: ESSource = ESSource.NORMALIZED) -> list[UserEmotion]:
    """Mean Emotional Score of each user with at least one observed cell."""
    n_users = matrix.shape[0]
    values = matrix.observed_values(source)
    counts = np.bincount(matrix.user_indices, minlength=n_users)
    sums = np.bincount(matrix.user_indices, weights=values, minlength=n_users)
    return [
        UserEmotion(user_index=i, user_id=matrix.user_ids[i], mean_es=float(sums[i] / counts[i]), count=int(counts[i]))
        for i in np.flatnonzero(counts > 0).tolist()
    ]


def total_emotional_score(matrix: EmotionMatrix, source: ESSource = ESSource.RAW) -> float:
    """Dataset-level Emotional Score: the sum over observed cells."""
    return float(matrix.observed_values(source).sum())


def genre_breakdown(ranking: EmotionalItemRanking) -> dict[str, int]:
    """How many ranked items carry each genre, most frequent first."""
    tally = Counter(genre for item in ranking.items for genre in item.genres)
    return dict(sorted(tally.items(), key=lambda kv: (-kv[1], kv[0])))


def export_emotion_scores(matrix: EmotionMatrix, path: Path) -> Path:
    """Write ``user_id,item_id,raw_es,normalized_es`` for every observed cell."""
    frame = pd.DataFrame({
        "user_id": np.asarray(matrix.user_ids, dtype=np.int64)[matrix.user_indices],
        "item_id": np.asarray(matrix.item_ids, dtype=np.int64)[matrix.item_indices],
        "raw_es": matrix.raw,
        "normalized_es": matrix.normalized_observed,
    })
    return write_frame(frame, path)


def export_ranking(ranking: EmotionalItemRanking, path: Path) -> Path:
    """Write ``title,year,genres,mean_es`` in rank order."""
    frame = pd.DataFrame(
        [
            {
                "title": item.title if item.title is not None else f"item {item.item_id}",
                "year": "" if item.year is None else item.year,
                "genres": "|".join(item.genres),
                "mean_es": item.mean_es,
            }
            for item in ranking.items
        ],
        columns=["title", "year", "genres", "mean_es"],
    )
    return write_frame(frame, path)


def export_user_emotion(profile: list[UserEmotion], path: Path) -> Path:
    frame = pd.DataFrame(
        [{"user_id": u.user_id, "mean_es": u.mean_es, "count": u.count} for u in profile],
        columns=["user_id", "mean_es", "count"],
    )
    return write_frame(frame, path)
