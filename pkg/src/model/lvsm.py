"""Encoder-decoder and decoder-only LVSM forward passes, and view synthesis.

Each target view is rendered by its own forward pass over the shared input
tokens, so targets never influence each other across views.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.diffnum import ops
from src.diffnum.tensor import Tensor
from src.geometry.camera import CameraModel
from src.geometry.normalization import SimilarityTransform, normalize_cameras, select_reference_view
from src.geometry.plucker import camera_plucker_map
from src.model.lvsm_config import Architecture, LvsmConfig
from src.model.masks import AttentionVariantMask, build_variant_mask
from src.model.transformer import apply_layer
from src.model.weights import LvsmWeights
from src.tokenizer.tokens import (
    TokenKind,
    TokenSequence,
    decode_output_head,
    tokenize_input_views,
    tokenize_target_view,
)
from src.utils.errors import ConfigError, ShapeError

PosedImage = Tuple[np.ndarray, CameraModel]


def _require(config: LvsmConfig, architecture: Architecture) -> None:
    if config.architecture != architecture:
        raise ConfigError(
            f"operation needs a {architecture.value} model, config is {config.architecture.value}"
        )


def _check_dims(weights: LvsmWeights, *sequences: TokenSequence) -> None:
    d = weights.w_input.shape[1]
    for seq in sequences:
        if seq.dim != d:
            raise ShapeError(f"{seq.kind.value} tokens have dim {seq.dim}, model expects {d}")


def decoder_mask(config: LvsmConfig, num_context: int, num_targets: int) -> AttentionVariantMask:
    return build_variant_mask(
        config.attention_variant, num_context, num_targets, architecture=config.architecture
    )


def encode_latents(
    input_tokens: TokenSequence, weights: LvsmWeights, config: LvsmConfig
) -> TokenSequence:
    """Run the encoder over ``[inputs | latents]`` and keep the latent outputs.

    The updated input tokens are computed and discarded.
    """
    _require(config, Architecture.ENCODER_DECODER)
    _check_dims(weights, input_tokens)
    if weights.latents is None:
        raise ConfigError("encoder-decoder weights carry no latent tokens")
    num_latents = weights.latents.shape[0]
    x = ops.concat([input_tokens.tokens, weights.latents], axis=0)
    for layer in weights.encoder:
        x = apply_layer(x, layer, config.num_heads)
    latents = ops.slice_(x, slice(input_tokens.length, input_tokens.length + num_latents))
    return TokenSequence(tokens=latents, kind=TokenKind.LATENT)


def decode_from_latents(
    latents: TokenSequence,
    target_tokens: TokenSequence,
    weights: LvsmWeights,
    config: LvsmConfig,
) -> TokenSequence:
    """Run the decoder over ``[latents | targets]`` and return the target outputs."""
    _require(config, Architecture.ENCODER_DECODER)
    _check_dims(weights, latents, target_tokens)
    mask = decoder_mask(config, latents.length, target_tokens.length)
    x = ops.concat([latents.tokens, target_tokens.tokens], axis=0)
    for layer in weights.decoder:
        x = apply_layer(x, layer, config.num_heads, mask)
    out = ops.slice_(x, slice(latents.length, latents.length + target_tokens.length))
    return target_tokens.with_tokens(out, kind=TokenKind.OUTPUT)


def forward_encoder_decoder(
    input_tokens: TokenSequence,
    target_tokens: TokenSequence,
    weights: LvsmWeights,
    config: LvsmConfig,
) -> TokenSequence:
    return decode_from_latents(
        encode_latents(input_tokens, weights, config), target_tokens, weights, config
    )


def forward_decoder_only(
    input_tokens: TokenSequence,
    target_tokens: TokenSequence,
    weights: LvsmWeights,
    config: LvsmConfig,
) -> TokenSequence:
    """Single stream over ``[inputs | targets]``; returns outputs at target positions."""
    _require(config, Architecture.DECODER_ONLY)
    _check_dims(weights, input_tokens, target_tokens)
    mask = decoder_mask(config, input_tokens.length, target_tokens.length)
    x = ops.concat([input_tokens.tokens, target_tokens.tokens], axis=0)
    for layer in weights.decoder:
        x = apply_layer(x, layer, config.num_heads, mask)
    out = ops.slice_(x, slice(input_tokens.length, input_tokens.length + target_tokens.length))
    return target_tokens.with_tokens(out, kind=TokenKind.OUTPUT)


def forward(
    input_tokens: TokenSequence,
    target_tokens: TokenSequence,
    weights: LvsmWeights,
    config: LvsmConfig,
) -> TokenSequence:
    """Dispatch to the configured architecture."""
    if config.is_encoder_decoder:
        return forward_encoder_decoder(input_tokens, target_tokens, weights, config)
    return forward_decoder_only(input_tokens, target_tokens, weights, config)


@dataclass
class NormalizedViews:
    """Input and target cameras expressed in the normalised frame."""

    inputs: List[CameraModel]
    targets: List[CameraModel]
    transform: SimilarityTransform
    reference_index: int


def normalize_views(
    input_cameras: Sequence[CameraModel], target_cameras: Sequence[CameraModel]
) -> NormalizedViews:
    """Normalise input cameras around a reference input and map targets alongside."""
    if not input_cameras:
        raise ShapeError("at least one input view is required")
    poses = [cam.pose for cam in input_cameras]
    reference = select_reference_view(poses)
    normalized, transform = normalize_cameras(poses, reference)
    return NormalizedViews(
        inputs=[cam.with_pose(pose) for cam, pose in zip(input_cameras, normalized)],
        targets=[transform.apply_to_camera(cam) for cam in target_cameras],
        transform=transform,
        reference_index=reference,
    )


def _image_size(images: Sequence[np.ndarray], patch_size: int) -> Tuple[int, int]:
    shapes = {tuple(np.shape(img)) for img in images}
    if len(shapes) != 1:
        raise ShapeError(f"all input images must share one shape, got {sorted(shapes)}")
    shape = shapes.pop()
    if len(shape) != 3 or shape[2] != 3:
        raise ShapeError(f"input images must be (H, W, 3), got {shape}")
    height, width = shape[:2]
    if height % patch_size or width % patch_size:
        raise ShapeError(f"image size {height}x{width} not divisible by patch size {patch_size}")
    return height, width


def render_views(
    weights: LvsmWeights,
    config: LvsmConfig,
    input_images: Sequence[np.ndarray],
    input_cameras: Sequence[CameraModel],
    target_cameras: Sequence[CameraModel],
    latents: Optional[TokenSequence] = None,
) -> List[Tensor]:
    """Differentiable rendering of every target camera.

    Args:
        weights: Model parameters.
        config: Architecture matching ``weights``.
        input_images: (H, W, 3) images in [0, 1].
        input_cameras: One camera per input image.
        target_cameras: Cameras to render at the input resolution.
        latents: Precomputed latents (encoder-decoder only); computed from
            the inputs when omitted.

    Returns:
        One (H, W, 3) tensor per target.
    """
    if len(input_images) != len(input_cameras):
        raise ShapeError(f"{len(input_images)} input images but {len(input_cameras)} cameras")
    height, width = _image_size(input_images, config.patch_size)
    views = normalize_views(input_cameras, target_cameras)
    input_tokens = tokenize_input_views(
        list(input_images),
        [camera_plucker_map(cam, height, width) for cam in views.inputs],
        weights.w_input,
    )
    if config.is_encoder_decoder and latents is None:
        latents = encode_latents(input_tokens, weights, config)

    outputs = []
    for camera in views.targets:
        target_tokens = tokenize_target_view(
            camera_plucker_map(camera, height, width), weights.w_target
        )
        if config.is_encoder_decoder:
            y = decode_from_latents(latents, target_tokens, weights, config)
        else:
            y = forward_decoder_only(input_tokens, target_tokens, weights, config)
        outputs.append(decode_output_head(y, weights.w_output))
    return outputs


def synthesize_views(
    weights: LvsmWeights,
    config: LvsmConfig,
    inputs: Sequence[PosedImage],
    targets: Sequence[CameraModel],
) -> List[np.ndarray]:
    """Render several targets from one set of posed inputs (latents encoded once)."""
    if not inputs:
        raise ShapeError("at least one input view is required")
    images = [np.asarray(img) for img, _ in inputs]
    cameras = [cam for _, cam in inputs]
    return [t.numpy() for t in render_views(weights, config, images, cameras, targets)]


def synthesize_view(
    weights: LvsmWeights,
    config: LvsmConfig,
    inputs: Sequence[PosedImage],
    target: CameraModel,
) -> np.ndarray:
    """Render one novel view as an (H, W, 3) array in (0, 1)."""
    return synthesize_views(weights, config, inputs, [target])[0]
