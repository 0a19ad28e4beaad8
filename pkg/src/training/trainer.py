"""Training driver: gradient computation, the skip/clip rules and the fit loop."""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from src.data.sampling import SceneExample
from src.diffnum import ops
from src.diffnum.grad_utils import clip_coefficient, global_grad_norm, scale_gradients
from src.diffnum.precision import is_verification_mode
from src.diffnum.tensor import Tape
from src.model.checkpoint import load_checkpoint, save_checkpoint
from src.model.lvsm import render_views
from src.model.lvsm_config import LvsmConfig
from src.model.weights import LvsmWeights
from src.training.losses import PerceptualProxy, compute_loss, make_proxy
from src.training.metrics_log import MetricsLog, StepMetrics
from src.training.optimizer import AdamW
from src.training.schedule import lr_at
from src.training.train_config import TrainConfig
from src.utils.errors import ConfigError, NonFiniteLossError
from src.utils.logger import get_logger
from src.utils.seeding import SAMPLING, make_rng

logger = get_logger(__name__)

METRICS_LOG_NAME = "metrics.log"
CHECKPOINT_DIR = "checkpoints"
FINAL_CHECKPOINT = "final.ckpt"


@dataclass
class TrainState:
    """Mutable training state, exclusively owned by one driver.

    Attributes:
        weights: Current parameters.
        optimizer: AdamW holding the moment accumulators.
        step: Completed optimisation steps, skipped ones included.
        skipped_steps: Steps rejected by the gradient-norm rule.
        seed: Root seed; per-step sampling randomness derives from it.
    """

    weights: LvsmWeights
    optimizer: AdamW
    step: int = 0
    skipped_steps: int = 0
    seed: int = 0

    @classmethod
    def create(cls, weights: LvsmWeights, config: TrainConfig, seed: int = 0) -> "TrainState":
        optimizer = AdamW(
            beta1=config.beta1,
            beta2=config.beta2,
            eps=config.eps,
            weight_decay=config.weight_decay,
        )
        return cls(weights=weights, optimizer=optimizer, seed=seed)


@dataclass
class GradientResult:
    """Loss of one batch; gradients are left on the weights."""

    loss: float
    view_losses: List[float] = field(default_factory=list)


def compute_gradients(
    weights: LvsmWeights,
    model_config: LvsmConfig,
    batch: Sequence[SceneExample],
    train_config: TrainConfig,
    proxy: Optional[PerceptualProxy] = None,
    step: int = 0,
) -> GradientResult:
    """Forward every target view of ``batch``, average the losses and backprop.

    Raises:
        ConfigError: If the batch is empty.
        NonFiniteLossError: If the loss is NaN or infinite.
    """
    if not batch:
        raise ConfigError("training batch is empty")
    proxy = proxy or make_proxy(train_config.perceptual_proxy)
    weights.zero_grad()

    with Tape() as tape:
        view_losses = []
        for example in batch:
            preds = render_views(
                weights,
                model_config,
                example.input_images,
                example.input_cameras,
                example.target_cameras,
            )
            for pred, target in zip(preds, example.target_images):
                view_losses.append(
                    compute_loss(pred, target, train_config.perceptual_weight, proxy)
                )
        if not view_losses:
            raise ConfigError("training batch has no target views")
        total = view_losses[0]
        for term in view_losses[1:]:
            total = ops.add(total, term)
        loss = ops.scale(total, 1.0 / len(view_losses))

    values = [t.item() for t in view_losses]
    if not np.isfinite(loss.item()):
        raise NonFiniteLossError(
            "non-finite training loss",
            {"step": step, "loss": loss.item(), "view_losses": values},
        )
    tape.backward(loss)
    return GradientResult(loss=loss.item(), view_losses=values)


def apply_gradients(
    state: TrainState, train_config: TrainConfig, loss: float = float("nan")
) -> StepMetrics:
    """Apply the skip rule, clip, and take an AdamW step.

    A step whose pre-clip global gradient norm exceeds ``skip_threshold``
    (or is not finite) only advances the step and skip counters.
    """
    params = state.weights.named_parameters()
    grad_norm = global_grad_norm(params)
    lr = lr_at(state.step + 1, train_config)
    skipped = not np.isfinite(grad_norm) or grad_norm > train_config.skip_threshold
    if skipped:
        state.skipped_steps += 1
        logger.warning(
            f"Skipping step {state.step + 1}: gradient norm {grad_norm:.4f} > "
            f"{train_config.skip_threshold}"
        )
    else:
        scale_gradients(params, clip_coefficient(grad_norm, train_config.clip_norm))
        state.optimizer.step(params, lr)
    state.step += 1
    return StepMetrics(step=state.step, loss=loss, grad_norm=grad_norm, lr=lr, skipped=skipped)


def train_step(
    state: TrainState,
    batch: Sequence[SceneExample],
    model_config: LvsmConfig,
    train_config: TrainConfig,
    proxy: Optional[PerceptualProxy] = None,
) -> Tuple[TrainState, StepMetrics]:
    """One optimisation step over ``batch``."""
    result = compute_gradients(
        state.weights, model_config, batch, train_config, proxy, step=state.step + 1
    )
    metrics = apply_gradients(state, train_config, loss=result.loss)
    logger.debug(
        f"step {metrics.step}: loss={metrics.loss:.6f} grad_norm={metrics.grad_norm:.4f} "
        f"lr={metrics.lr:.3e} skipped={metrics.skipped}"
    )
    return state, metrics


def sample_batch(
    dataset: Sequence[SceneExample], batch_size: int, seed: int, step: int
) -> List[SceneExample]:
    """Deterministically pick ``batch_size`` examples for ``step``."""
    rng = make_rng(seed, SAMPLING, step)
    replace = batch_size > len(dataset)
    indices = rng.choice(len(dataset), size=batch_size, replace=replace)
    return [dataset[int(i)] for i in indices]


class Trainer:
    """Runs training over an in-memory dataset with logging and checkpoints.

    Args:
        model_config: Architecture of ``state.weights``.
        train_config: Optimisation recipe.
        state: Initial (or resumed) training state.
        output_dir: Receives ``metrics.log`` and ``checkpoints/``.
        run_config: Config snapshot embedded into every checkpoint.
    """

    def __init__(
        self,
        model_config: LvsmConfig,
        train_config: TrainConfig,
        state: TrainState,
        output_dir: Union[str, Path],
        run_config: Optional[Dict] = None,
    ) -> None:
        self.model_config = model_config
        self.train_config = train_config
        self.state = state
        self.output_dir = Path(output_dir)
        self.run_config = dict(run_config or {})
        self.proxy = make_proxy(train_config.perceptual_proxy)

    @classmethod
    def resume(
        cls,
        checkpoint_path: Union[str, Path],
        model_config: LvsmConfig,
        train_config: TrainConfig,
        output_dir: Union[str, Path],
        run_config: Optional[Dict] = None,
    ) -> "Trainer":
        """Restore weights, moments and counters from a checkpoint."""
        ckpt = load_checkpoint(checkpoint_path, expected=model_config)
        state = TrainState.create(ckpt.weights, train_config, seed=ckpt.seed)
        state.step = ckpt.step
        state.skipped_steps = ckpt.skipped_steps
        state.optimizer.load_state_dict(
            ckpt.optimizer_state,
            t=int(ckpt.extra.get("optimizer_t", 0)),
            parameters=state.weights.named_parameters(),
        )
        logger.info(f"Resuming from {checkpoint_path} at step {state.step}")
        return cls(model_config, train_config, state, output_dir, run_config)

    @property
    def metrics_path(self) -> Path:
        return self.output_dir / METRICS_LOG_NAME

    def checkpoint_path(self, step: Optional[int] = None) -> Path:
        name = FINAL_CHECKPOINT if step is None else f"step_{step:07d}.ckpt"
        return self.output_dir / CHECKPOINT_DIR / name

    def save(self, path: Path) -> Path:
        return save_checkpoint(
            path,
            self.state.weights,
            self.model_config,
            seed=self.state.seed,
            step=self.state.step,
            skipped_steps=self.state.skipped_steps,
            run_config=self.run_config,
            optimizer_state=self.state.optimizer.state_dict(),
            extra={
                "optimizer_t": self.state.optimizer.t,
                "verification_mode": is_verification_mode(),
            },
        )

    def fit(self, dataset: Sequence[SceneExample], total_steps: Optional[int] = None) -> TrainState:
        """Train until ``total_steps`` (default: the schedule length).

        Returns:
            The final state; a final checkpoint is always written.
        """
        if not dataset:
            raise ConfigError("cannot train on an empty dataset")
        total = self.train_config.total_steps if total_steps is None else int(total_steps)
        cfg = self.train_config
        resume_step = self.state.step if self.state.step > 0 else None
        logger.info(
            f"Training {self.model_config.architecture.value} model from step {self.state.step} "
            f"to {total} on {len(dataset)} examples"
        )
        with MetricsLog(self.metrics_path, resume_step=resume_step) as log:
            while self.state.step < total:
                batch = sample_batch(dataset, cfg.batch_size, self.state.seed, self.state.step)
                _, metrics = train_step(self.state, batch, self.model_config, cfg, self.proxy)
                log.write(metrics)
                if metrics.step % cfg.log_every == 0:
                    logger.info(
                        f"step {metrics.step}/{total} loss={metrics.loss:.6f} "
                        f"grad_norm={metrics.grad_norm:.4f} lr={metrics.lr:.3e}"
                    )
                if cfg.checkpoint_every and metrics.step % cfg.checkpoint_every == 0:
                    self.save(self.checkpoint_path(metrics.step))
        self.save(self.checkpoint_path())
        logger.info(
            f"Training finished at step {self.state.step} "
            f"({self.state.skipped_steps} skipped steps)"
        )
        return self.state
