"""Minimal differentiable numerics: tensors, a reverse-mode tape, and attention."""

from src.diffnum.attention import attention_logits, attention_weights, qknorm_attention
from src.diffnum.grad_utils import (
    clip_coefficient,
    global_grad_norm,
    scale_gradients,
    zero_gradients,
)
from src.diffnum.precision import (
    get_default_dtype,
    is_verification_mode,
    set_default_dtype,
    verification_mode,
)
from src.diffnum.tensor import Tape, TapeNode, Tensor, active_tape, as_tensor

__all__ = [
    "Tape",
    "TapeNode",
    "Tensor",
    "active_tape",
    "as_tensor",
    "attention_logits",
    "attention_weights",
    "clip_coefficient",
    "get_default_dtype",
    "global_grad_norm",
    "is_verification_mode",
    "qknorm_attention",
    "scale_gradients",
    "set_default_dtype",
    "verification_mode",
    "zero_gradients",
]
