"""Rating dataset models: sparse triples, item catalog and split/column parameters."""
from typing import Iterator, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


class RatingDataset(BaseModel):
    """Sparse (user, item, rating) triples over dense internal indices.

    ``user_ids[k]`` is the external id of internal user ``k`` (same for items).
    Internal indices follow ascending external id. Triple arrays are read-only.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    user_ids: list[int] = Field(default_factory=list, description="External user id per internal index")
    item_ids: list[int] = Field(default_factory=list, description="External item id per internal index")
    user_indices: np.ndarray
    item_indices: np.ndarray
    ratings: np.ndarray
    max_rating: float = Field(default=5.0, gt=0.0, description="Rating-scale ceiling")
    duplicate_count: int = Field(default=0, ge=0, description="Duplicate pairs dropped (keep-last)")

    @model_validator(mode="after")
    def _freeze_arrays(self) -> "RatingDataset":
        if not (len(self.user_indices) == len(self.item_indices) == len(self.ratings)):
            raise ValueError("Triple arrays must have equal length")
        for array in (self.user_indices, self.item_indices, self.ratings):
            array.setflags(write=False)
        return self

    @property
    def n_users(self) -> int:
        """Dense user count N."""
        return len(self.user_ids)

    @property
    def n_items(self) -> int:
        """Dense item count M."""
        return len(self.item_ids)

    @property
    def triples(self) -> list[tuple[int, int, float]]:
        return list(self.iter_triples())

    def iter_triples(self) -> Iterator[tuple[int, int, float]]:
        for i, j, r in zip(self.user_indices.tolist(), self.item_indices.tolist(), self.ratings.tolist()):
            yield i, j, r

    def subset(self, mask: np.ndarray) -> "RatingDataset":
        """Dataset holding the selected triples and the same id maps (no reindexing)."""
        return RatingDataset(
            user_ids=self.user_ids,
            item_ids=self.item_ids,
            user_indices=self.user_indices[mask].copy(),
            item_indices=self.item_indices[mask].copy(),
            ratings=self.ratings[mask].copy(),
            max_rating=self.max_rating,
        )

    def __len__(self) -> int:
        return len(self.ratings)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RatingDataset):
            return NotImplemented
        return (
            self.user_ids == other.user_ids
            and self.item_ids == other.item_ids
            and self.max_rating == other.max_rating
            and np.array_equal(self.user_indices, other.user_indices)
            and np.array_equal(self.item_indices, other.item_indices)
            and np.array_equal(self.ratings, other.ratings)
        )

    __hash__ = None


class CatalogEntry(BaseModel):
    """Descriptive metadata for one item."""
    item_id: int
    title: str
    year: Optional[int] = None
    genres: list[str] = Field(default_factory=list)


class ItemCatalog(BaseModel):
    """Item metadata keyed by internal item index."""
    entries: dict[int, CatalogEntry] = Field(default_factory=dict)

    def get(self, item_index: int) -> Optional[CatalogEntry]:
        return self.entries.get(item_index)

    def __len__(self) -> int:
        return len(self.entries)


class SplitSpec(BaseModel):
    """Train/test split parameters. Bounds are checked by the split itself."""
    test_fraction: float = 0.2
    seed: int = 42


class ColumnSpec(BaseModel):
    """Column names and scale for delimited rating files."""
    user_col: str = "user_id"
    item_col: str = "item_id"
    rating_col: str = "rating"
    max_rating: float = Field(default=5.0, gt=0.0)
    delimiter: str = ","
