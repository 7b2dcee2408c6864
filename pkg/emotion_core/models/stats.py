"""Per-item popularity statistics."""
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from emotion_core.models.enums import PopularityClass


class PopularityThresholds(BaseModel):
    """Quantiles above which an item's score or count counts as large."""
    score_quantile: float = Field(default=0.5, ge=0.0, le=1.0)
    count_quantile: float = Field(default=0.5, ge=0.0, le=1.0)


class ItemStats(BaseModel):
    """Score_j (mean rating) and Count_j (rating count) over the dense item range.

    Items never rated have ``count == 0`` and ``score == nan`` and are treated
    as absent. ``popular`` is None until the stats are classified.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    score: np.ndarray
    count: np.ndarray
    popular: Optional[np.ndarray] = None
    thresholds: Optional[PopularityThresholds] = None
    score_threshold: Optional[float] = None
    count_threshold: Optional[float] = None

    @property
    def rated(self) -> np.ndarray:
        """Boolean mask of items present in the stats."""
        return self.count > 0

    @property
    def item_indices(self) -> np.ndarray:
        return np.flatnonzero(self.rated)

    @property
    def is_classified(self) -> bool:
        return self.popular is not None

    def __contains__(self, item_index: int) -> bool:
        return 0 <= item_index < len(self.count) and bool(self.count[item_index] > 0)

    def __len__(self) -> int:
        return int(np.count_nonzero(self.rated))

    def popularity_class(self, item_index: int) -> Optional[PopularityClass]:
        if self.popular is None or item_index not in self:
            return None
        return PopularityClass.POPULAR if self.popular[item_index] else PopularityClass.OBSCURE
