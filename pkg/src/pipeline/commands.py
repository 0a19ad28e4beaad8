"""Command implementations behind the CLI subcommands.

Each function takes a validated :class:`RunConfig` and returns a small
result record; argument parsing and exit codes live in ``src.main``.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Union

from src.config.run_config import RunConfig
from src.data.dataset import manifest_cameras, read_dataset, write_dataset
from src.data.image_io import load_image, save_image
from src.data.sampling import SceneExample, sample_example
from src.data.scene import generate_scene
from src.evaluation.harness import decode_timing, evaluate_dataset, view_count_sweep
from src.evaluation.report import EvalReport
from src.model.checkpoint import describe_architecture, load_checkpoint
from src.model.lvsm import synthesize_views
from src.model.weights import count_parameters, init_weights
from src.training.trainer import Trainer, TrainState
from src.utils.errors import ConfigError, DatasetIOError
from src.utils.logger import get_logger
from src.utils.seeding import DATA, INIT, SAMPLING, derive_seed

logger = get_logger(__name__)

TRAIN_SPLIT = 0
EVAL_SPLIT = 1


@dataclass
class GenDataResult:
    train_dir: Path
    eval_dir: Optional[Path]
    num_train: int
    num_eval: int


@dataclass
class TrainResult:
    checkpoint: Path
    metrics_log: Path
    steps: int
    skipped_steps: int


@dataclass
class RenderResult:
    outputs: List[Path] = field(default_factory=list)


def make_examples(
    config: RunConfig, count: int, split: int, num_inputs: Optional[int] = None
) -> List[SceneExample]:
    """Generate ``count`` synthetic examples for one split, all seeded from ``config.seed``."""
    data = config.data
    examples = []
    for index in range(count):
        scene = generate_scene(derive_seed(config.seed, DATA, split, index))
        example = sample_example(
            scene,
            mode=data.mode,
            num_inputs=num_inputs if num_inputs is not None else data.num_inputs,
            num_targets=data.num_targets,
            seed=derive_seed(config.seed, SAMPLING, split, index),
            height=data.height,
            width=data.width,
            fov_degrees=data.fov_degrees,
        )
        example.scene_id = f"scene_{index:05d}"
        examples.append(example)
    return examples


def generate_data(config: RunConfig) -> GenDataResult:
    """Write the training split and, if configured, the evaluation split."""
    data = config.data
    train_dir = write_dataset(make_examples(config, data.num_scenes, TRAIN_SPLIT), data.root)
    eval_dir = None
    if data.eval_root and data.num_eval_scenes > 0:
        eval_examples = make_examples(
            config, data.num_eval_scenes, EVAL_SPLIT, num_inputs=data.eval_num_inputs
        )
        eval_dir = write_dataset(eval_examples, data.eval_root)
    return GenDataResult(
        train_dir=Path(train_dir),
        eval_dir=Path(eval_dir) if eval_dir is not None else None,
        num_train=data.num_scenes,
        num_eval=data.num_eval_scenes if eval_dir is not None else 0,
    )


def run_training(
    config: RunConfig,
    resume_from: Optional[Union[str, Path]] = None,
    dataset_dir: Optional[Union[str, Path]] = None,
) -> TrainResult:
    """Train on the dataset at ``data.root`` (or ``dataset_dir``)."""
    dataset = read_dataset(dataset_dir or config.data.root)
    output_dir = Path(config.output_dir)
    config.write_snapshot(output_dir / "config.yaml")
    snapshot = config.snapshot()
    if resume_from is not None:
        trainer = Trainer.resume(resume_from, config.model, config.train, output_dir, snapshot)
    else:
        weights = init_weights(config.model, derive_seed(config.seed, INIT))
        logger.info(
            f"Initialised {describe_architecture(config.model)} "
            f"with {count_parameters(weights)} parameters"
        )
        state = TrainState.create(weights, config.train, seed=config.seed)
        trainer = Trainer(config.model, config.train, state, output_dir, snapshot)
    state = trainer.fit(dataset)
    return TrainResult(
        checkpoint=trainer.checkpoint_path(),
        metrics_log=trainer.metrics_path,
        steps=state.step,
        skipped_steps=state.skipped_steps,
    )


def run_evaluation(
    config: RunConfig,
    checkpoint: Union[str, Path],
    sweep: Sequence[int] = (),
    timing: bool = False,
    grids: bool = False,
    dataset_dir: Optional[Union[str, Path]] = None,
    output_dir: Optional[Union[str, Path]] = None,
) -> EvalReport:
    """Score a checkpoint on the evaluation split and write the report."""
    ckpt = load_checkpoint(checkpoint, expected=config.model)
    root = dataset_dir or config.data.eval_root
    if root is None:
        raise ConfigError("no evaluation dataset: set data.eval_root or pass --data")
    examples = read_dataset(root)
    out = Path(output_dir) if output_dir is not None else Path(config.output_dir) / "eval"
    grid_dir = out / "grids" if (grids or config.eval.grids) else None

    report = evaluate_dataset(
        ckpt.weights, ckpt.config, examples, num_inputs=config.eval.num_inputs, grid_dir=grid_dir
    )
    counts = list(sweep) or list(config.eval.sweep_counts)
    if counts:
        report.sweep = view_count_sweep(ckpt.weights, ckpt.config, examples, counts)
    if timing:
        height, width = examples[0].image_size
        report.timing = decode_timing(
            ckpt.weights,
            ckpt.config,
            config.eval.timing_counts,
            repetitions=config.eval.timing_repetitions,
            height=height,
            width=width,
            seed=config.seed,
        )
    report.metadata.update(
        {
            "checkpoint": str(checkpoint),
            "step": ckpt.step,
            "model": describe_architecture(ckpt.config),
            "scenes": len(examples),
        }
    )
    report.write(out)
    return report


def run_render(
    config: RunConfig,
    checkpoint: Union[str, Path],
    inputs_dir: Union[str, Path],
    targets_manifest: Union[str, Path],
    output_dir: Union[str, Path],
) -> RenderResult:
    """Render every camera of ``targets_manifest`` from the input views in ``inputs_dir``."""
    ckpt = load_checkpoint(checkpoint, expected=config.model)
    inputs_dir = Path(inputs_dir)
    manifest = inputs_dir / "cameras.json"
    posed = []
    for role, image_name, camera in manifest_cameras(manifest):
        if role != "input":
            continue
        if not image_name:
            raise DatasetIOError(str(manifest), "input view without an image file")
        size = (camera.intrinsics.height, camera.intrinsics.width)
        posed.append((load_image(inputs_dir / image_name, expected_size=size), camera))
    if not posed:
        raise DatasetIOError(str(manifest), "no input views to condition on")

    targets = [camera for _, _, camera in manifest_cameras(targets_manifest)]
    images = synthesize_views(ckpt.weights, ckpt.config, posed, targets)
    output_dir = Path(output_dir)
    result = RenderResult()
    for i, image in enumerate(images):
        result.outputs.append(save_image(output_dir / f"render_{i:03d}.png", image))
    logger.info(f"Rendered {len(images)} views from {len(posed)} inputs into {output_dir}")
    return result
