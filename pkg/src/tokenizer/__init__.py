"""Patchify images and ray maps into tokens, and decode tokens back into images."""

from src.tokenizer.patches import PatchGrid, patchify, unpatchify, unpatchify_tensor
from src.tokenizer.tokens import (
    INPUT_CHANNELS,
    TokenKind,
    TokenSequence,
    decode_output_head,
    tokenize_input_view,
    tokenize_input_views,
    tokenize_target_view,
)

__all__ = [
    "INPUT_CHANNELS",
    "PatchGrid",
    "TokenKind",
    "TokenSequence",
    "decode_output_head",
    "patchify",
    "tokenize_input_view",
    "tokenize_input_views",
    "tokenize_target_view",
    "unpatchify",
    "unpatchify_tensor",
]
