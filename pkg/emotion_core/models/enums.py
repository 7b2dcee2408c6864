"""Enum definitions for popularity classes, algorithms and rendering options."""
from enum import Enum


class PopularityClass(str, Enum):
    """Rating-derived popularity of an item, selecting the Emotional Score branch."""
    POPULAR = "popular"   # High average score or high rating count
    OBSCURE = "obscure"   # Everything else


class Algorithm(str, Enum):
    """Algorithms known to the comparison runner."""
    MF = "mf"          # Classic cosine matrix factorization
    EMF = "emf"        # Emotion-regularized matrix factorization
    RANDOM = "random"  # Random placement baseline


class DatasetFormat(str, Enum):
    """Input formats understood by the dataset loaders."""
    MOVIELENS = "movielens"  # UserID::MovieID::Rating::Timestamp
    CSV = "csv"              # Delimited text with header and named columns
    TRIPLES = "triples"      # Canonical user_id,item_id,rating export


class ESSource(str, Enum):
    """Which Emotional Score values an aggregate is computed from."""
    NORMALIZED = "normalized"
    RAW = "raw"


class PoolingMode(str, Enum):
    """How matrix cells are combined when a heatmap is downsampled."""
    MEAN = "mean"
    MAX = "max"


class DMEUsers(str, Enum):
    """Which users contribute recommendation lists to the Matthew Effect fit."""
    TEST = "test"
    ALL = "all"
