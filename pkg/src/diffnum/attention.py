"""Multi-head scaled attention with QK-Norm.

Queries and keys are L2-normalised per head before the dot product and the
cosine similarities are multiplied by one learnable gain per head, so every
logit is bounded by the magnitude of its head's gain.
"""

from typing import Optional, Tuple

import numpy as np

from src.diffnum.tensor import Tensor, TensorLike, as_tensor, record_op
from src.utils.errors import DegenerateMaskError, ShapeError

QK_NORM_EPS = 1e-12


def _check_shapes(
    q: Tensor, k: Tensor, v: Tensor, gains: Tensor, mask: Optional[np.ndarray]
) -> None:
    if q.ndim != 3 or k.ndim != 3 or v.ndim != 3:
        raise ShapeError(
            f"attention expects (L, heads, head_dim) operands, got {q.shape}, {k.shape}, {v.shape}"
        )
    if k.shape != v.shape:
        raise ShapeError(f"key shape {k.shape} != value shape {v.shape}")
    if q.shape[1:] != k.shape[1:]:
        raise ShapeError(f"query shape {q.shape} incompatible with key shape {k.shape}")
    if gains.shape != (q.shape[1],):
        raise ShapeError(f"gains shape {gains.shape} != ({q.shape[1]},)")
    if k.shape[0] == 0:
        raise ShapeError("attention over an empty key set")
    if mask is not None:
        if mask.shape != (q.shape[0], k.shape[0]):
            raise ShapeError(f"mask shape {mask.shape} != ({q.shape[0]}, {k.shape[0]})")
        blocked = np.flatnonzero(~mask.any(axis=1))
        if blocked.size:
            raise DegenerateMaskError(
                f"attention mask blocks every key for query rows {blocked[:8].tolist()}"
            )


def _normalize_heads(x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """(L, h, dh) -> unit vectors laid out (h, L, dh) plus their norms."""
    xt = np.transpose(x, (1, 0, 2))
    norm = np.sqrt(np.sum(xt * xt, axis=-1, keepdims=True) + QK_NORM_EPS)
    return xt / norm, norm


def _probabilities(
    qh: np.ndarray, kh: np.ndarray, gains: np.ndarray, mask: Optional[np.ndarray]
) -> Tuple[np.ndarray, np.ndarray]:
    cosine = qh @ np.swapaxes(kh, -1, -2)
    logits = gains[:, None, None] * cosine
    if mask is not None:
        logits = np.where(mask[None, :, :], logits, -np.inf)
    shifted = logits - np.max(logits, axis=-1, keepdims=True)
    e = np.exp(shifted)
    return cosine, e / np.sum(e, axis=-1, keepdims=True)


def attention_logits(
    q: TensorLike, k: TensorLike, gains: TensorLike, mask: Optional[np.ndarray] = None
) -> np.ndarray:
    """Return the (h, L_q, L_k) logits; masked entries are ``-inf``."""
    q, k, gains = as_tensor(q), as_tensor(k), as_tensor(gains)
    qh, _ = _normalize_heads(q.data)
    kh, _ = _normalize_heads(k.data)
    logits = gains.data[:, None, None] * (qh @ np.swapaxes(kh, -1, -2))
    if mask is not None:
        logits = np.where(mask[None, :, :], logits, -np.inf)
    return logits


def attention_weights(
    q: TensorLike, k: TensorLike, gains: TensorLike, mask: Optional[np.ndarray] = None
) -> np.ndarray:
    """Return the (h, L_q, L_k) softmax weights used by :func:`qknorm_attention`."""
    q, k, gains = as_tensor(q), as_tensor(k), as_tensor(gains)
    if mask is not None:
        mask = np.asarray(mask, dtype=bool)
    _check_shapes(q, k, k, gains, mask)
    qh, _ = _normalize_heads(q.data)
    kh, _ = _normalize_heads(k.data)
    return _probabilities(qh, kh, gains.data, mask)[1]


def qknorm_attention(
    q: TensorLike,
    k: TensorLike,
    v: TensorLike,
    gains: TensorLike,
    mask: Optional[np.ndarray] = None,
) -> Tensor:
    """Masked multi-head attention with per-head L2 QK-Norm.

    Args:
        q: Queries, shape (L_q, h, d_h).
        k: Keys, shape (L_k, h, d_h).
        v: Values, shape (L_k, h, d_h).
        gains: One logit scale per head, shape (h,).
        mask: Optional boolean (L_q, L_k) matrix; ``True`` marks an allowed
            key. ``None`` means every query sees every key.

    Returns:
        Attention output of shape (L_q, h, d_h).

    Raises:
        ShapeError: If operand shapes disagree.
        DegenerateMaskError: If a mask row allows no key.
    """
    q, k, v, gains = as_tensor(q), as_tensor(k), as_tensor(v), as_tensor(gains)
    if mask is not None:
        mask = np.asarray(mask, dtype=bool)
    _check_shapes(q, k, v, gains, mask)

    qh, q_norm = _normalize_heads(q.data)
    kh, k_norm = _normalize_heads(k.data)
    vt = np.transpose(v.data, (1, 0, 2))
    g = gains.data
    cosine, probs = _probabilities(qh, kh, g, mask)
    out = np.transpose(probs @ vt, (1, 0, 2))

    def backward(grad: np.ndarray):
        d_out = np.transpose(grad, (1, 0, 2))
        d_v = np.transpose(np.swapaxes(probs, -1, -2) @ d_out, (1, 0, 2))
        d_probs = d_out @ np.swapaxes(vt, -1, -2)
        d_logits = probs * (d_probs - np.sum(d_probs * probs, axis=-1, keepdims=True))
        d_gains = np.sum(d_logits * cosine, axis=(1, 2))
        d_cosine = g[:, None, None] * d_logits
        d_qh = d_cosine @ kh
        d_kh = np.swapaxes(d_cosine, -1, -2) @ qh
        d_q = (d_qh - qh * np.sum(qh * d_qh, axis=-1, keepdims=True)) / q_norm
        d_k = (d_kh - kh * np.sum(kh * d_kh, axis=-1, keepdims=True)) / k_norm
        return (
            np.transpose(d_q, (1, 0, 2)),
            np.transpose(d_k, (1, 0, 2)),
            d_v,
            d_gains,
        )

    out = out.astype(q.dtype, copy=False)
    return record_op("qknorm_attention", out, (q, k, v, gains), backward)
