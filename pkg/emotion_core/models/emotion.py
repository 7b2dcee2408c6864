"""Emotional Score matrix and rankings."""
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from emotion_core.models.enums import ESSource
from emotion_core.models.stats import PopularityThresholds


class EmotionMatrix(BaseModel):
    """Raw and log-normalized Emotional Scores.

    ``raw`` and ``normalized_observed`` are aligned with the observed cells
    ``(user_indices[k], item_indices[k])``; ``normalized`` is the dense N x M
    matrix with 0 at unobserved cells.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    user_indices: np.ndarray
    item_indices: np.ndarray
    raw: np.ndarray
    normalized_observed: np.ndarray
    normalized: np.ndarray
    user_ids: list[int] = Field(default_factory=list)
    item_ids: list[int] = Field(default_factory=list)
    thresholds_used: Optional[PopularityThresholds] = None

    @property
    def shape(self) -> tuple[int, int]:
        return self.normalized.shape

    def raw_map(self) -> dict[tuple[int, int], float]:
        """Observed (user_index, item_index) -> raw ES."""
        return {
            (i, j): es
            for i, j, es in zip(self.user_indices.tolist(), self.item_indices.tolist(), self.raw.tolist())
        }

    def observed_values(self, source: ESSource = ESSource.NORMALIZED) -> np.ndarray:
        return self.raw if source == ESSource.RAW else self.normalized_observed

    def observed_mask(self) -> np.ndarray:
        mask = np.zeros(self.shape, dtype=bool)
        mask[self.user_indices, self.item_indices] = True
        return mask


class RankedItem(BaseModel):
    """One row of an emotional item ranking."""
    item_index: int
    item_id: int
    mean_es: float
    observations: int
    title: Optional[str] = None
    year: Optional[int] = None
    genres: list[str] = Field(default_factory=list)


class EmotionalItemRanking(BaseModel):
    """Items ordered by mean Emotional Score, highest first."""
    items: list[RankedItem] = Field(default_factory=list)
    source: ESSource = ESSource.NORMALIZED

    def __len__(self) -> int:
        return len(self.items)

    def titles(self) -> list[Optional[str]]:
        return [item.title for item in self.items]


class UserEmotion(BaseModel):
    """Mean Emotional Score of one user's observed cells."""
    user_index: int
    user_id: int
    mean_es: float
    count: int
