"""LVSM transformer architectures, attention-variant masks and checkpoints."""

from src.model.checkpoint import Checkpoint, load_checkpoint, save_checkpoint
from src.model.lvsm import (
    decode_from_latents,
    encode_latents,
    forward,
    forward_decoder_only,
    forward_encoder_decoder,
    render_views,
    synthesize_view,
    synthesize_views,
)
from src.model.lvsm_config import Architecture, AttentionVariant, LvsmConfig
from src.model.masks import AttentionVariantMask, build_variant_mask, mask_from_flags
from src.model.transformer import apply_layer, transformer_layer
from src.model.weights import (
    LayerWeights,
    LvsmWeights,
    count_parameters,
    init_weights,
    layer_init_std,
    parameter_breakdown,
)

__all__ = [
    "Architecture",
    "AttentionVariant",
    "AttentionVariantMask",
    "Checkpoint",
    "LayerWeights",
    "LvsmConfig",
    "LvsmWeights",
    "apply_layer",
    "build_variant_mask",
    "count_parameters",
    "decode_from_latents",
    "encode_latents",
    "forward",
    "forward_decoder_only",
    "forward_encoder_decoder",
    "init_weights",
    "layer_init_std",
    "load_checkpoint",
    "mask_from_flags",
    "parameter_breakdown",
    "render_views",
    "save_checkpoint",
    "synthesize_view",
    "synthesize_views",
    "transformer_layer",
]
