"""Photometric training loss.

``loss = MSE(pred, gt) + λ · proxy(pred, gt)``. The perceptual term is a
pluggable proxy; the default compares horizontal and vertical finite
differences of the two images (an edge-sensitive stand-in for a
network-based perceptual loss).
"""

from typing import Optional, Protocol

import numpy as np

from src.diffnum import ops
from src.diffnum.tensor import Tensor, TensorLike, as_tensor
from src.training.train_config import ProxyKind
from src.utils.errors import ConfigError, ShapeError


class PerceptualProxy(Protocol):
    """A differentiable image-similarity term."""

    name: str

    def __call__(self, pred: Tensor, target: Tensor) -> Tensor:
        """Return a non-negative scalar that is zero when ``pred == target``."""
        ...


class GradientDifferenceProxy:
    """Mean absolute difference of horizontal and vertical image gradients."""

    name = ProxyKind.GRADIENT_DIFFERENCE.value

    def __call__(self, pred: Tensor, target: Tensor) -> Tensor:
        if pred.ndim != 3 or pred.shape[0] < 2 or pred.shape[1] < 2:
            raise ShapeError(f"gradient-difference proxy needs (H>=2, W>=2, C), got {pred.shape}")

        def dx(t: Tensor) -> Tensor:
            right = ops.slice_(t, (slice(None), slice(1, None)))
            return ops.subtract(right, ops.slice_(t, (slice(None), slice(None, -1))))

        def dy(t: Tensor) -> Tensor:
            return ops.subtract(ops.slice_(t, slice(1, None)), ops.slice_(t, slice(None, -1)))

        horizontal = ops.mean(ops.absolute(ops.subtract(dx(pred), dx(target))))
        vertical = ops.mean(ops.absolute(ops.subtract(dy(pred), dy(target))))
        return ops.add(horizontal, vertical)


class NullProxy:
    """Always zero; turns the loss into plain MSE."""

    name = ProxyKind.NONE.value

    def __call__(self, pred: Tensor, target: Tensor) -> Tensor:
        return Tensor(np.zeros((), dtype=pred.dtype))


def make_proxy(kind: ProxyKind) -> PerceptualProxy:
    kind = ProxyKind(kind)
    if kind == ProxyKind.GRADIENT_DIFFERENCE:
        return GradientDifferenceProxy()
    if kind == ProxyKind.NONE:
        return NullProxy()
    raise ConfigError(f"unknown perceptual proxy '{kind}'")


def mse_loss(pred: TensorLike, target: TensorLike) -> Tensor:
    pred, target = as_tensor(pred), as_tensor(target)
    if pred.shape != target.shape:
        raise ShapeError(f"prediction shape {pred.shape} != target shape {target.shape}")
    return ops.mean(ops.square(ops.subtract(pred, target)))


def compute_loss(
    pred: TensorLike,
    target: TensorLike,
    perceptual_weight: float,
    proxy: Optional[PerceptualProxy] = None,
) -> Tensor:
    """Scalar loss for one rendered view.

    Args:
        pred: Predicted (H, W, 3) image.
        target: Ground-truth (H, W, 3) image.
        perceptual_weight: λ ≥ 0.
        proxy: Perceptual term; :class:`GradientDifferenceProxy` by default.

    Raises:
        ShapeError: If the images differ in shape.
    """
    if perceptual_weight < 0:
        raise ConfigError(f"perceptual weight must be >= 0, got {perceptual_weight}")
    pred, target = as_tensor(pred), as_tensor(target)
    loss = mse_loss(pred, target)
    if perceptual_weight == 0:
        return loss
    proxy = proxy or GradientDifferenceProxy()
    return ops.add(loss, ops.scale(proxy(pred, target), perceptual_weight))
