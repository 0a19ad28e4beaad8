"""Learning-rate schedule: linear warmup from 0, then cosine decay to 0."""

import math

from src.training.train_config import TrainConfig


def lr_at(step: int, config: TrainConfig) -> float:
    """Learning rate at ``step`` (clamped to ``[0, total_steps]``)."""
    step = min(max(int(step), 0), config.total_steps)
    warmup = config.warmup_steps
    if step < warmup:
        return config.peak_lr * step / warmup
    progress = (step - warmup) / (config.total_steps - warmup)
    return config.peak_lr * 0.5 * (1.0 + math.cos(math.pi * progress))
