"""Attention masks for the decoder variants.

A decoder sequence is laid out as ``[context | targets]`` where the context
is the latent tokens (encoder-decoder) or the input-image tokens
(decoder-only). Each variant is one cell of a 2×2 matrix:

=================  ==============  ==============
variant            latents update  targets joint
=================  ==============  ==============
full               yes             yes
frozen-latents     no              yes
per-patch          yes             no
pure-cross         no              no
=================  ==============  ==============

``True`` in a mask marks a key the query row may attend to.
"""

from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

from src.model.lvsm_config import Architecture, AttentionVariant
from src.utils.errors import ConfigError, DegenerateMaskError

_VARIANT_FLAGS = {
    AttentionVariant.FULL: (True, True),
    AttentionVariant.FROZEN_LATENTS: (False, True),
    AttentionVariant.PER_PATCH: (True, False),
    AttentionVariant.PURE_CROSS: (False, False),
}


@dataclass(frozen=True, eq=False)
class AttentionVariantMask:
    """A boolean (L, L) mask over ``[context | targets]`` plus the flags that built it."""

    matrix: np.ndarray
    latents_updated: bool
    targets_joint: bool
    num_context: int
    num_targets: int

    def __post_init__(self) -> None:
        matrix = np.array(self.matrix, dtype=bool, copy=True)
        size = self.num_context + self.num_targets
        if matrix.shape != (size, size):
            raise DegenerateMaskError(f"mask shape {matrix.shape} != ({size}, {size})")
        empty = np.flatnonzero(~matrix.any(axis=1))
        if empty.size:
            raise DegenerateMaskError(f"mask rows {empty[:8].tolist()} allow no keys")
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    @property
    def flags(self) -> Tuple[bool, bool]:
        return self.latents_updated, self.targets_joint

    @property
    def is_full(self) -> bool:
        return bool(self.matrix.all())

    @property
    def allowed_entries(self) -> int:
        return int(self.matrix.sum())

    def for_attention(self) -> Optional[np.ndarray]:
        """Matrix for :func:`qknorm_attention`; ``None`` when nothing is masked."""
        return None if self.is_full else self.matrix


def mask_from_flags(
    latents_updated: bool, targets_joint: bool, num_context: int, num_targets: int
) -> AttentionVariantMask:
    """Build the mask for one cell of the (latents-updated, targets-joint) matrix."""
    if num_context < 1 or num_targets < 1:
        raise ConfigError(
            f"mask needs at least one context and one target token, got {num_context}/{num_targets}"
        )
    size = num_context + num_targets
    matrix = np.zeros((size, size), dtype=bool)
    ctx = slice(0, num_context)
    tgt = slice(num_context, size)
    matrix[ctx, ctx] = True if latents_updated else np.eye(num_context, dtype=bool)
    matrix[ctx, tgt] = latents_updated and targets_joint
    matrix[tgt, ctx] = True
    matrix[tgt, tgt] = targets_joint
    return AttentionVariantMask(
        matrix=matrix,
        latents_updated=latents_updated,
        targets_joint=targets_joint,
        num_context=num_context,
        num_targets=num_targets,
    )


def build_variant_mask(
    kind: Union[AttentionVariant, str],
    num_context: int,
    num_targets: int,
    architecture: Union[Architecture, str] = Architecture.ENCODER_DECODER,
) -> AttentionVariantMask:
    """Build the decoder mask for an attention variant.

    Args:
        kind: Variant name or enum.
        num_context: Latent count (encoder-decoder) or input-token count
            (decoder-only).
        num_targets: Target-query token count.
        architecture: Model layout the mask is for.

    Raises:
        ConfigError: For an unknown kind, or a variant the architecture
            does not support.
    """
    try:
        variant = AttentionVariant(kind)
        arch = Architecture(architecture)
    except ValueError as exc:
        raise ConfigError(
            f"unknown attention variant or architecture: {kind!r}, {architecture!r}"
        ) from exc
    if arch == Architecture.DECODER_ONLY and variant not in (
        AttentionVariant.FULL,
        AttentionVariant.PER_PATCH,
    ):
        raise ConfigError(f"variant '{variant.value}' requires latent tokens (encoder-decoder)")
    latents_updated, targets_joint = _VARIANT_FLAGS[variant]
    return mask_from_flags(latents_updated, targets_joint, num_context, num_targets)
