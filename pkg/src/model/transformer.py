"""Pre-norm transformer block with QK-Norm attention."""

from typing import Optional, Union

import numpy as np

from src.diffnum import ops
from src.diffnum.attention import qknorm_attention
from src.diffnum.tensor import Tensor
from src.model.masks import AttentionVariantMask
from src.model.weights import LayerWeights
from src.tokenizer.tokens import TokenSequence
from src.utils.errors import ShapeError

MaskLike = Optional[Union[np.ndarray, AttentionVariantMask]]


def _resolve_mask(mask: MaskLike) -> Optional[np.ndarray]:
    if isinstance(mask, AttentionVariantMask):
        return mask.for_attention()
    return mask


def self_attention(x: Tensor, layer: LayerWeights, num_heads: int, mask: MaskLike = None) -> Tensor:
    """Multi-head QK-Norm self-attention of an already-normalised (L, d) input."""
    length, d = x.shape
    head_dim = d // num_heads
    q = ops.reshape(ops.matmul(x, layer.w_q), (length, num_heads, head_dim))
    k = ops.reshape(ops.matmul(x, layer.w_k), (length, num_heads, head_dim))
    v = ops.reshape(ops.matmul(x, layer.w_v), (length, num_heads, head_dim))
    attended = qknorm_attention(q, k, v, layer.qk_gain, _resolve_mask(mask))
    return ops.matmul(ops.reshape(attended, (length, d)), layer.w_o)


def mlp(x: Tensor, layer: LayerWeights) -> Tensor:
    return ops.matmul(ops.gelu(ops.matmul(x, layer.w_mlp_in)), layer.w_mlp_out)


def apply_layer(x: Tensor, layer: LayerWeights, num_heads: int, mask: MaskLike = None) -> Tensor:
    """``x + Attn(LN(x))`` followed by ``+ MLP(LN(·))`` on an (L, d) tensor."""
    if x.ndim != 2 or x.shape[1] != layer.w_q.shape[0]:
        raise ShapeError(f"layer expects (L, {layer.w_q.shape[0]}) tokens, got {x.shape}")
    if x.shape[1] % num_heads:
        raise ShapeError(f"token dim {x.shape[1]} not divisible by {num_heads} heads")
    attended = self_attention(ops.layer_norm_no_bias(x, layer.ln1_gain), layer, num_heads, mask)
    x = ops.add(x, attended)
    return ops.add(x, mlp(ops.layer_norm_no_bias(x, layer.ln2_gain), layer))


def transformer_layer(
    tokens: TokenSequence, layer: LayerWeights, num_heads: int, mask: MaskLike = None
) -> TokenSequence:
    """Run one block over a token sequence, keeping its metadata."""
    return tokens.with_tokens(apply_layer(tokens.tokens, layer, num_heads, mask))
