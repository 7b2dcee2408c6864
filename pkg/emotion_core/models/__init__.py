"""Models package."""
from emotion_core.models.enums import Algorithm, DatasetFormat, DMEUsers, ESSource, PoolingMode, PopularityClass
from emotion_core.models.dataset import CatalogEntry, ColumnSpec, ItemCatalog, RatingDataset, SplitSpec
from emotion_core.models.stats import ItemStats, PopularityThresholds
from emotion_core.models.emotion import EmotionalItemRanking, EmotionMatrix, RankedItem, UserEmotion
from emotion_core.models.factor import FactorModel, GradientScratch, TrainConfig
from emotion_core.models.raster import Colormap, RasterSpec
from emotion_core.models.report import EvalReport, RunManifest

__all__ = [
    "Algorithm",
    "DatasetFormat",
    "DMEUsers",
    "ESSource",
    "PoolingMode",
    "PopularityClass",
    "CatalogEntry",
    "ColumnSpec",
    "ItemCatalog",
    "RatingDataset",
    "SplitSpec",
    "ItemStats",
    "PopularityThresholds",
    "EmotionalItemRanking",
    "EmotionMatrix",
    "RankedItem",
    "UserEmotion",
    "FactorModel",
    "GradientScratch",
    "TrainConfig",
    "Colormap",
    "RasterSpec",
    "EvalReport",
    "RunManifest",
]
