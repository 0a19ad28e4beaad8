"""Loss, schedule, AdamW and the training driver."""

from src.training.losses import (
    GradientDifferenceProxy,
    NullProxy,
    PerceptualProxy,
    compute_loss,
    make_proxy,
    mse_loss,
)
from src.training.metrics_log import MetricsLog, StepMetrics, read_metrics_log
from src.training.optimizer import AdamW, adamw_step
from src.training.schedule import lr_at
from src.training.train_config import ProxyKind, TrainConfig
from src.training.trainer import (
    TrainState,
    Trainer,
    apply_gradients,
    compute_gradients,
    sample_batch,
    train_step,
)

__all__ = [
    "AdamW",
    "GradientDifferenceProxy",
    "MetricsLog",
    "NullProxy",
    "PerceptualProxy",
    "ProxyKind",
    "StepMetrics",
    "TrainConfig",
    "TrainState",
    "Trainer",
    "adamw_step",
    "apply_gradients",
    "compute_gradients",
    "compute_loss",
    "lr_at",
    "make_proxy",
    "mse_loss",
    "read_metrics_log",
    "sample_batch",
    "train_step",
]
