"""Optimisation hyperparameters."""

from enum import Enum
from typing import Any, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.data.sampling import SamplingMode


class ProxyKind(str, Enum):
    GRADIENT_DIFFERENCE = "gradient-difference"
    NONE = "none"


OBJECT_PERCEPTUAL_WEIGHT = 1.0
SCENE_PERCEPTUAL_WEIGHT = 0.5
DEFAULT_WARMUP_STEPS = 2500
DEFAULT_TOTAL_STEPS = 100_000


class TrainConfig(BaseModel):
    """Training recipe.

    Attributes:
        peak_lr: Learning rate at the end of warmup.
        warmup_steps: Linear warmup length, starting from 0. When omitted it is
            min(2500, total_steps // 10), and at least 1.
        total_steps: Schedule length; the cosine reaches 0 here.
        batch_size: Examples per optimisation step.
        perceptual_weight: λ in ``MSE + λ·proxy``.
        perceptual_proxy: Which proxy term to use.
        clip_norm: Global gradient-norm clipping threshold.
        skip_threshold: Steps whose pre-clip norm exceeds this are skipped.
        beta1: Adam first-moment decay.
        beta2: Adam second-moment decay.
        eps: Adam denominator epsilon.
        weight_decay: Decoupled decay for every parameter except LN gains.
        checkpoint_every: Periodic checkpoint interval in steps (0 disables).
        log_every: Interval for INFO progress messages.
    """

    model_config = ConfigDict(extra="forbid")

    peak_lr: float = Field(default=4e-4, gt=0.0)
    warmup_steps: int = Field(default=DEFAULT_WARMUP_STEPS, ge=1)
    total_steps: int = Field(default=DEFAULT_TOTAL_STEPS, ge=2)
    batch_size: int = Field(default=8, ge=1)
    perceptual_weight: float = Field(default=OBJECT_PERCEPTUAL_WEIGHT, ge=0.0)
    perceptual_proxy: ProxyKind = ProxyKind.GRADIENT_DIFFERENCE
    clip_norm: float = Field(default=1.0, gt=0.0)
    skip_threshold: float = Field(default=5.0, gt=0.0)
    beta1: float = Field(default=0.9, ge=0.0, lt=1.0)
    beta2: float = Field(default=0.95, ge=0.0, lt=1.0)
    eps: float = Field(default=1e-8, gt=0.0)
    weight_decay: float = Field(default=0.05, ge=0.0)
    checkpoint_every: int = Field(default=1000, ge=0)
    log_every: int = Field(default=100, ge=1)

    @model_validator(mode="before")
    @classmethod
    def _derive_warmup(cls, data: Any) -> Any:
        if not isinstance(data, dict) or data.get("warmup_steps") is not None:
            return data
        try:
            total = int(data.get("total_steps", DEFAULT_TOTAL_STEPS))
        except (TypeError, ValueError):
            # reported by field validation
            return data
        return {**data, "warmup_steps": max(1, min(DEFAULT_WARMUP_STEPS, total // 10))}

    @model_validator(mode="after")
    def _check_schedule(self) -> "TrainConfig":
        if not 0 < self.warmup_steps < self.total_steps:
            raise ValueError(
                f"need 0 < warmup_steps < total_steps, "
                f"got {self.warmup_steps} and {self.total_steps}"
            )
        return self

    @classmethod
    def for_mode(cls, mode: Union[SamplingMode, str], **overrides: object) -> "TrainConfig":
        """Defaults for object-style (λ=1.0) or scene-style (λ=0.5) data."""
        scene_style = SamplingMode(mode) == SamplingMode.SCENE
        weight = SCENE_PERCEPTUAL_WEIGHT if scene_style else OBJECT_PERCEPTUAL_WEIGHT
        params = {"perceptual_weight": weight}
        params.update(overrides)
        return cls(**params)
