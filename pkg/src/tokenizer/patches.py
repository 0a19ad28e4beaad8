"""Non-overlapping ViT-style patch grids.

Patch order is row-major over the patch grid; inside a patch, pixels are
row-major and each pixel's channels are contiguous.
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from src.diffnum import ops
from src.diffnum.tensor import Tensor, TensorLike, as_tensor
from src.utils.errors import ShapeError


@dataclass(frozen=True, eq=False)
class PatchGrid:
    """Flattened patches of one H×W×C array.

    Attributes:
        patches: Array of shape (H·W/p², p·p·C).
        patch_size: Patch side p in pixels.
        channels: Channel count C.
        grid_shape: (H/p, W/p).
    """

    patches: np.ndarray
    patch_size: int
    channels: int
    grid_shape: Tuple[int, int]

    @property
    def num_patches(self) -> int:
        return int(self.patches.shape[0])

    @property
    def image_shape(self) -> Tuple[int, int, int]:
        rows, cols = self.grid_shape
        return rows * self.patch_size, cols * self.patch_size, self.channels


def _check_divisible(height: int, width: int, p: int) -> None:
    if p < 1:
        raise ShapeError(f"patch size must be positive, got {p}")
    if height % p or width % p:
        raise ShapeError(f"image size {height}x{width} is not divisible by patch size {p}")


def patchify(array: np.ndarray, p: int) -> PatchGrid:
    """Split an (H, W, C) array into a :class:`PatchGrid`."""
    array = np.asarray(array)
    if array.ndim != 3:
        raise ShapeError(f"patchify expects an (H, W, C) array, got shape {array.shape}")
    h, w, c = array.shape
    _check_divisible(h, w, p)
    rows, cols = h // p, w // p
    blocks = array.reshape(rows, p, cols, p, c).transpose(0, 2, 1, 3, 4)
    patches = blocks.reshape(rows * cols, p * p * c)
    return PatchGrid(patches=patches, patch_size=p, channels=c, grid_shape=(rows, cols))


def unpatchify(grid: PatchGrid) -> np.ndarray:
    """Inverse of :func:`patchify`; exact."""
    rows, cols = grid.grid_shape
    p, c = grid.patch_size, grid.channels
    if grid.patches.shape != (rows * cols, p * p * c):
        raise ShapeError(
            f"patch array shape {grid.patches.shape} does not match grid {grid.grid_shape} "
            f"with p={p}, C={c}"
        )
    blocks = grid.patches.reshape(rows, cols, p, p, c).transpose(0, 2, 1, 3, 4)
    return blocks.reshape(rows * p, cols * p, c)


def unpatchify_tensor(
    patches: TensorLike, grid_shape: Tuple[int, int], p: int, channels: int
) -> Tensor:
    """Differentiable :func:`unpatchify` for a (num_patches, p·p·C) tensor."""
    patches = as_tensor(patches)
    rows, cols = grid_shape
    if patches.shape != (rows * cols, p * p * channels):
        raise ShapeError(
            f"cannot place {patches.shape} patches on a {rows}x{cols} grid with p={p}, C={channels}"
        )
    x = ops.reshape(patches, (rows, cols, p, p, channels))
    x = ops.transpose(x, (0, 2, 1, 3, 4))
    return ops.reshape(x, (rows * p, cols * p, channels))
