"""Evaluation harnesses: standard eval, input-view sweep and decode timing."""

import statistics
import time
from pathlib import Path
from typing import List, Optional, Sequence, Union

import numpy as np

from src.data.image_io import save_image
from src.data.sampling import SceneExample, object_cameras
from src.diffnum.precision import get_default_dtype
from src.evaluation.image_metrics import psnr, ssim
from src.evaluation.report import EvalReport, SceneResult, SweepRow, TimingRow
from src.geometry.camera import CameraIntrinsics
from src.geometry.plucker import camera_plucker_map
from src.model.lvsm import (
    decode_from_latents,
    encode_latents,
    forward_decoder_only,
    normalize_views,
    synthesize_views,
)
from src.model.lvsm_config import LvsmConfig
from src.model.weights import LvsmWeights
from src.tokenizer.tokens import (
    TokenSequence,
    decode_output_head,
    tokenize_input_views,
    tokenize_target_view,
)
from src.utils.errors import ConfigError
from src.utils.logger import get_logger

logger = get_logger(__name__)

MIN_TIMING_REPETITIONS = 3
GRID_SEPARATOR = 2


def nearest_view_baseline(example: SceneExample) -> List[np.ndarray]:
    """For each target, copy the input image whose camera center is closest."""
    centers = np.stack([cam.pose.center for cam in example.input_cameras])
    preds = []
    for camera in example.target_cameras:
        dist = np.linalg.norm(centers - camera.pose.center, axis=1)
        preds.append(np.array(example.inputs[int(np.argmin(dist))].image, copy=True))
    return preds


def write_image_grid(
    path: Union[str, Path],
    inputs: Sequence[np.ndarray],
    prediction: np.ndarray,
    ground_truth: np.ndarray,
) -> Path:
    """Save ``inputs | prediction | ground truth`` side by side as one image."""
    height = prediction.shape[0]
    gap = np.ones((height, GRID_SEPARATOR, 3))
    tiles: List[np.ndarray] = []
    for tile in list(inputs) + [prediction, ground_truth]:
        if tiles:
            tiles.append(gap)
        tiles.append(np.asarray(tile, dtype=np.float64))
    return save_image(path, np.concatenate(tiles, axis=1))


def evaluate_dataset(
    weights: LvsmWeights,
    config: LvsmConfig,
    examples: Sequence[SceneExample],
    num_inputs: Optional[int] = None,
    include_baseline: bool = True,
    grid_dir: Optional[Union[str, Path]] = None,
) -> EvalReport:
    """Render every target of every example and score it.

    Args:
        weights: Model parameters.
        config: Architecture.
        examples: Evaluation scenes.
        num_inputs: Use only the first ``num_inputs`` input views.
        include_baseline: Also score the nearest-input-view baseline.
        grid_dir: When set, write a PNG grid for each scene's first target.

    Raises:
        ConfigError: If ``num_inputs`` exceeds an example's input views.
    """
    report = EvalReport(metadata={"architecture": config.architecture.value})
    for example in examples:
        if num_inputs is not None:
            example = example.with_inputs(num_inputs)
        preds = synthesize_views(weights, config, example.posed_inputs, example.target_cameras)
        gts = example.target_images
        result = SceneResult(
            scene_id=example.scene_id,
            psnr=float(np.mean([psnr(p, g) for p, g in zip(preds, gts)])),
            ssim=float(np.mean([ssim(p, g) for p, g in zip(preds, gts)])),
            num_inputs=len(example.inputs),
            num_targets=len(example.targets),
        )
        if include_baseline:
            baseline = nearest_view_baseline(example)
            result.baseline_psnr = float(np.mean([psnr(b, g) for b, g in zip(baseline, gts)]))
            result.baseline_ssim = float(np.mean([ssim(b, g) for b, g in zip(baseline, gts)]))
        report.scenes.append(result)
        if grid_dir is not None and preds:
            write_image_grid(
                Path(grid_dir) / f"{example.scene_id}.png", example.input_images, preds[0], gts[0]
            )
        logger.debug(f"{example.scene_id}: PSNR {result.psnr:.3f} dB, SSIM {result.ssim:.4f}")
    if report.scenes:
        logger.info(
            f"Evaluated {len(report.scenes)} scenes: PSNR {report.mean_psnr:.3f} dB, "
            f"SSIM {report.mean_ssim:.4f}"
        )
    return report


def view_count_sweep(
    weights: LvsmWeights,
    config: LvsmConfig,
    examples: Sequence[SceneExample],
    counts: Sequence[int],
) -> List[SweepRow]:
    """Mean PSNR/SSIM when rendering with the first ``c`` input views, per count.

    Raises:
        ConfigError: If a count is < 1 or exceeds the available views.
    """
    if not examples:
        raise ConfigError("view-count sweep needs at least one example")
    available = min(len(e.inputs) for e in examples)
    for count in counts:
        if not 1 <= count <= available:
            raise ConfigError(
                f"sweep count {count} outside 1..{available} (available input views)"
            )
    rows = []
    for count in counts:
        report = evaluate_dataset(
            weights, config, examples, num_inputs=count, include_baseline=False
        )
        rows.append(SweepRow(num_inputs=int(count), psnr=report.mean_psnr, ssim=report.mean_ssim))
        logger.info(f"Sweep c={count}: PSNR {rows[-1].psnr:.3f} dB, SSIM {rows[-1].ssim:.4f}")
    return rows


def _timing_inputs(count: int, height: int, width: int, seed: int):
    rng = np.random.default_rng(seed)
    intrinsics = CameraIntrinsics.from_fov(60.0, width, height)
    cameras = object_cameras(rng, count + 1, intrinsics)
    images = [
        rng.uniform(0.0, 1.0, size=(height, width, 3)).astype(get_default_dtype())
        for _ in range(count)
    ]
    return images, cameras[:count], cameras[count]


def _decode_target(
    weights: LvsmWeights,
    config: LvsmConfig,
    context: TokenSequence,
    target_tokens: TokenSequence,
) -> np.ndarray:
    """One target view from input tokens (decoder-only) or latents (encoder-decoder)."""
    if config.is_encoder_decoder:
        y = decode_from_latents(context, target_tokens, weights, config)
    else:
        y = forward_decoder_only(context, target_tokens, weights, config)
    return decode_output_head(y, weights.w_output).numpy()


def decode_timing(
    weights: LvsmWeights,
    config: LvsmConfig,
    counts: Sequence[int],
    repetitions: int = 5,
    height: int = 32,
    width: int = 32,
    seed: int = 0,
) -> List[TimingRow]:
    """Median seconds to decode one target view, per input-view count.

    Encoder-decoder models are timed on the decoder pass only (latents are
    encoded beforehand); decoder-only models are timed on the full pass. One
    warmup run per count is excluded.

    Raises:
        ConfigError: If ``repetitions`` < 3.
    """
    if repetitions < MIN_TIMING_REPETITIONS:
        raise ConfigError(f"decode timing needs at least {MIN_TIMING_REPETITIONS} repetitions")
    rows = []
    for count in counts:
        images, input_cams, target_cam = _timing_inputs(int(count), height, width, seed)
        views = normalize_views(input_cams, [target_cam])
        input_tokens = tokenize_input_views(
            images, [camera_plucker_map(c, height, width) for c in views.inputs], weights.w_input
        )
        target_tokens = tokenize_target_view(
            camera_plucker_map(views.targets[0], height, width), weights.w_target
        )
        context = input_tokens
        if config.is_encoder_decoder:
            context = encode_latents(input_tokens, weights, config)
        sequence_length = context.length + target_tokens.length

        reference = _decode_target(weights, config, context, target_tokens)
        seconds = []
        identical = True
        for _ in range(repetitions):
            start = time.perf_counter()
            out = _decode_target(weights, config, context, target_tokens)
            seconds.append(time.perf_counter() - start)
            identical = identical and np.array_equal(out, reference)
        rows.append(
            TimingRow(
                num_inputs=int(count),
                median_seconds=float(statistics.median(seconds)),
                repetitions=repetitions,
                sequence_length=int(sequence_length),
                outputs_identical=bool(identical),
            )
        )
        logger.info(
            f"Decode timing N={count}: {rows[-1].median_seconds * 1e3:.2f} ms/target "
            f"(sequence length {sequence_length})"
        )
    return rows
