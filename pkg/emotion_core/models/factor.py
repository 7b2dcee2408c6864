"""Latent factor model and training configuration."""
from typing import NamedTuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field


class TrainConfig(BaseModel):
    """SGD hyperparameters shared by MF and EMF."""
    model_config = ConfigDict(frozen=True)

    d: int = Field(default=16, ge=1, description="Latent dimension")
    learning_rate: float = Field(default=0.005, gt=0.0, description="SGD step size beta")
    emotion_weight: float = Field(default=0.01, ge=0.0, description="Regularization coefficient lambda")
    epochs: int = Field(default=20, ge=1)
    seed: int = 42
    init_scale: float = Field(default=0.1, gt=0.0)
    cosine_floor: float = Field(default=1e-6, gt=0.0, description="Clamp for |t3| relative to t2")
    norm_floor: float = Field(default=1e-12, gt=0.0, description="Minimum vector norm")


class FactorModel(BaseModel):
    """User factors U (N x d) and item factors V (M x d)."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    U: np.ndarray
    V: np.ndarray
    max_rating: float = Field(gt=0.0)
    config: TrainConfig = Field(default_factory=TrainConfig)
    loss_history: list[float] = Field(default_factory=list, description="Total loss after each epoch")

    @property
    def d(self) -> int:
        return self.U.shape[1]

    @property
    def n_users(self) -> int:
        return self.U.shape[0]

    @property
    def n_items(self) -> int:
        return self.V.shape[0]

    def is_finite(self) -> bool:
        return bool(np.isfinite(self.U).all() and np.isfinite(self.V).all())


class GradientScratch(NamedTuple):
    """Per-step intermediates of the EMF gradient. Recomputed for every (i, j)."""
    t0: float        # ||U_i||
    t1: float        # ||V_j||
    t2: float        # t0 * t1
    t3: float        # U_i . V_j
    B: float         # lambda / (score_j * count_j)
    residual: float  # R_ij / max_rating - t3 / t2
