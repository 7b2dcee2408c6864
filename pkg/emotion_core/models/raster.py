"""Heatmap rendering parameters."""
from pydantic import BaseModel, Field, field_validator

from emotion_core.models.enums import PoolingMode


class Colormap(BaseModel):
    """Lookup table defined by evenly spaced RGB control points, linearly interpolated."""
    name: str
    control_points: list[tuple[int, int, int]] = Field(..., min_length=2)

    @field_validator("control_points")
    @classmethod
    def _check_channels(cls, points: list[tuple[int, int, int]]) -> list[tuple[int, int, int]]:
        for point in points:
            if any(not 0 <= c <= 255 for c in point):
                raise ValueError(f"RGB channel outside [0, 255]: {point}")
        return points


# Ten samples of matplotlib's viridis, low to high
VIRIDIS = Colormap(
    name="viridis",
    control_points=[
        (68, 1, 84), (72, 40, 120), (62, 74, 137), (49, 104, 142), (38, 130, 142),
        (31, 158, 137), (53, 183, 121), (109, 205, 89), (180, 222, 44), (253, 231, 37),
    ],
)

GRAYSCALE = Colormap(name="grayscale", control_points=[(0, 0, 0), (255, 255, 255)])


class RasterSpec(BaseModel):
    """Output bounds and appearance of an ES heatmap."""
    max_width: int = Field(default=1024, ge=1)
    max_height: int = Field(default=1024, ge=1)
    colormap: Colormap = Field(default_factory=lambda: VIRIDIS)
    pooling: PoolingMode = PoolingMode.MEAN
    separate_observed: bool = Field(False, description="Remap observed cells to [0.05, 1]")
    sort_by_count: bool = Field(False, description="Order rows/columns by rating count, descending")
