"""Evaluation reports and run manifests."""
from typing import Optional

from pydantic import BaseModel, Field


class EvalReport(BaseModel):
    """Accuracy and fairness of one algorithm on one split."""
    algorithm: str = Field(..., description="Algorithm name (mf, emf, random or external)")
    mae: float = Field(..., ge=0.0)
    dme: float = Field(..., ge=0.0, description="Degree of Matthew Effect")
    top_k: int = Field(..., ge=1)
    seed: int
    dataset_id: str
    emotion_weight: Optional[float] = Field(None, description="Lambda for EMF rows")
    config_snapshot: str = Field("{}", description="JSON snapshot of the configuration used")
    evaluated_on: str = Field("held-out", description="Which split the metrics were computed on")

    @property
    def label(self) -> str:
        if self.emotion_weight is None:
            return self.algorithm.upper()
        return f"{self.algorithm.upper()} λ={self.emotion_weight:g}"


class RunManifest(BaseModel):
    """Provenance record written next to every artifact-producing run."""
    subcommand: str
    flags: dict = Field(default_factory=dict)
    seeds: dict[str, int] = Field(default_factory=dict)
    input_digests: dict[str, str] = Field(default_factory=dict, description="Input path -> SHA-256")
    tool_version: str
    outputs: list[str] = Field(default_factory=list)
