"""Token sequences and the linear tokenizers / output head.

Input views become tokens through ``[image patch | Plücker patch] @ W_in``,
target views through ``Plücker patch @ W_tgt``; output tokens are decoded with
``sigmoid(y @ W_out)`` and placed back on the image grid. None of the maps
carry a bias.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence, Tuple

import numpy as np

from src.diffnum import ops
from src.diffnum.precision import get_default_dtype
from src.diffnum.tensor import Tensor
from src.geometry.plucker import PLUCKER_CHANNELS, PluckerMap
from src.tokenizer.patches import patchify, unpatchify_tensor
from src.utils.errors import ShapeError

IMAGE_CHANNELS = 3
INPUT_CHANNELS = IMAGE_CHANNELS + PLUCKER_CHANNELS


class TokenKind(str, Enum):
    """Provenance of a token sequence."""

    INPUT_IMAGE = "input-image"
    TARGET_QUERY = "target-query"
    LATENT = "latent"
    OUTPUT = "output"


@dataclass
class TokenSequence:
    """An ordered (L, d) block of tokens with provenance metadata.

    Attributes:
        tokens: Tensor of shape (L, d).
        kind: Where the tokens came from.
        num_views: Number of views that produced the tokens (input kind).
        patches_per_view: H·W/p² for image-derived kinds.
        grid_shape: Patch grid (H/p, W/p) for image-derived kinds.
        patch_size: Patch side p.
    """

    tokens: Tensor
    kind: TokenKind
    num_views: int = 1
    patches_per_view: Optional[int] = None
    grid_shape: Optional[Tuple[int, int]] = None
    patch_size: Optional[int] = None

    def __post_init__(self) -> None:
        if self.tokens.ndim != 2:
            raise ShapeError(f"tokens must be (L, d), got {self.tokens.shape}")
        if self.patches_per_view is not None:
            expected = self.num_views * self.patches_per_view
            if self.length != expected:
                raise ShapeError(
                    f"{self.kind.value} sequence has {self.length} tokens, expected "
                    f"{self.num_views} x {self.patches_per_view} = {expected}"
                )

    @property
    def length(self) -> int:
        return int(self.tokens.shape[0])

    @property
    def dim(self) -> int:
        return int(self.tokens.shape[1])

    @property
    def image_size(self) -> Tuple[int, int]:
        if self.grid_shape is None or self.patch_size is None:
            raise ShapeError(f"{self.kind.value} sequence carries no image grid metadata")
        return self.grid_shape[0] * self.patch_size, self.grid_shape[1] * self.patch_size

    def with_tokens(self, tokens: Tensor, kind: Optional[TokenKind] = None) -> "TokenSequence":
        return TokenSequence(
            tokens=tokens,
            kind=kind or self.kind,
            num_views=self.num_views,
            patches_per_view=self.patches_per_view,
            grid_shape=self.grid_shape,
            patch_size=self.patch_size,
        )


def _patch_size_from_weight(weight: Tensor, channels: int) -> int:
    if weight.ndim != 2:
        raise ShapeError(f"tokenizer weight must be 2-D, got {weight.shape}")
    p = int(round(np.sqrt(weight.shape[0] / channels)))
    if p < 1 or p * p * channels != weight.shape[0]:
        raise ShapeError(
            f"tokenizer weight rows {weight.shape[0]} are not p²·{channels} for any patch size p"
        )
    return p


def _as_float(array: np.ndarray) -> np.ndarray:
    return np.asarray(array, dtype=get_default_dtype())


def tokenize_input_view(image: np.ndarray, plucker: PluckerMap, weight: Tensor) -> TokenSequence:
    """Tokenize one posed input view.

    Args:
        image: (H, W, 3) array with values in [0, 1].
        plucker: The view's Plücker map, same H and W.
        weight: Input map of shape (p²·9, d).

    Returns:
        An input-image :class:`TokenSequence` of length H·W/p².
    """
    image = np.asarray(image)
    if image.ndim != 3 or image.shape[-1] != IMAGE_CHANNELS:
        raise ShapeError(f"input image must be (H, W, 3), got {image.shape}")
    if image.shape[:2] != plucker.values.shape[:2]:
        raise ShapeError(
            f"image size {image.shape[:2]} differs from "
            f"Plücker map size {plucker.values.shape[:2]}"
        )
    p = _patch_size_from_weight(weight, INPUT_CHANNELS)
    img_grid = patchify(image, p)
    ray_grid = patchify(plucker.values, p)
    features = np.concatenate([img_grid.patches, ray_grid.patches], axis=1)
    tokens = ops.matmul(Tensor(_as_float(features)), weight)
    return TokenSequence(
        tokens=tokens,
        kind=TokenKind.INPUT_IMAGE,
        num_views=1,
        patches_per_view=img_grid.num_patches,
        grid_shape=img_grid.grid_shape,
        patch_size=p,
    )


def tokenize_input_views(
    images: Sequence[np.ndarray], pluckers: Sequence[PluckerMap], weight: Tensor
) -> TokenSequence:
    """Tokenize several input views and flatten them into one sequence."""
    if not images or len(images) != len(pluckers):
        raise ShapeError(
            f"need matching non-empty image/Plücker lists, got {len(images)}/{len(pluckers)}"
        )
    views = [tokenize_input_view(img, ray, weight) for img, ray in zip(images, pluckers)]
    first = views[0]
    for view in views[1:]:
        if view.grid_shape != first.grid_shape:
            raise ShapeError("all input views must share one resolution")
    return TokenSequence(
        tokens=ops.concat([v.tokens for v in views], axis=0),
        kind=TokenKind.INPUT_IMAGE,
        num_views=len(views),
        patches_per_view=first.patches_per_view,
        grid_shape=first.grid_shape,
        patch_size=first.patch_size,
    )


def tokenize_target_view(plucker: PluckerMap, weight: Tensor) -> TokenSequence:
    """Tokenize a target camera's Plücker map with the (p²·6, d) target map."""
    p = _patch_size_from_weight(weight, PLUCKER_CHANNELS)
    grid = patchify(plucker.values, p)
    tokens = ops.matmul(Tensor(_as_float(grid.patches)), weight)
    return TokenSequence(
        tokens=tokens,
        kind=TokenKind.TARGET_QUERY,
        num_views=1,
        patches_per_view=grid.num_patches,
        grid_shape=grid.grid_shape,
        patch_size=p,
    )


def decode_output_head(outputs: TokenSequence, weight: Tensor) -> Tensor:
    """Map output tokens to an (H, W, 3) image strictly inside (0, 1).

    Args:
        outputs: Output tokens carrying the target grid metadata.
        weight: Output map of shape (d, 3·p²).

    Raises:
        ShapeError: If the token count is not H·W/p² or the weight does not
            match the token dimension and patch size.
    """
    if outputs.grid_shape is None or outputs.patch_size is None:
        raise ShapeError("output tokens carry no target grid metadata")
    rows, cols = outputs.grid_shape
    p = outputs.patch_size
    if outputs.length != rows * cols:
        raise ShapeError(f"expected {rows * cols} output tokens, got {outputs.length}")
    if weight.shape != (outputs.dim, IMAGE_CHANNELS * p * p):
        raise ShapeError(
            f"output weight {weight.shape} != ({outputs.dim}, {IMAGE_CHANNELS * p * p})"
        )
    patches = ops.sigmoid(ops.matmul(outputs.tokens, weight))
    # A saturated sigmoid rounds to exactly 0 or 1; keep the open interval.
    zero, one = np.zeros(1, dtype=patches.dtype), np.ones(1, dtype=patches.dtype)
    low, high = np.nextafter(zero, one)[0], np.nextafter(one, zero)[0]
    patches = ops.clip(patches, low, high)
    return unpatchify_tensor(patches, (rows, cols), p, IMAGE_CHANNELS)
