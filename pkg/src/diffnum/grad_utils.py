"""Helpers that operate on the gradients of a parameter collection."""

from typing import Iterable, Mapping, Union

import numpy as np

from src.diffnum.tensor import Tensor
from src.utils.errors import StateError

Parameters = Union[Mapping[str, Tensor], Iterable[Tensor]]


def _as_items(parameters: Parameters):
    if isinstance(parameters, Mapping):
        return list(parameters.items())
    return [(t.name or f"param[{i}]", t) for i, t in enumerate(parameters)]


def global_grad_norm(parameters: Parameters) -> float:
    """Euclidean norm over the concatenation of every parameter gradient.

    Accumulates in float64 regardless of the parameter dtype.

    Raises:
        StateError: If any parameter has no gradient.
    """
    total = 0.0
    for name, tensor in _as_items(parameters):
        if tensor.grad is None:
            raise StateError(f"parameter '{name}' has no gradient; run backward first")
        g = tensor.grad.astype(np.float64, copy=False)
        total += float(np.sum(g * g))
    return float(np.sqrt(total))


def clip_coefficient(grad_norm: float, max_norm: float) -> float:
    """Factor ``min(1, max_norm / grad_norm)`` that clips a gradient to ``max_norm``."""
    if grad_norm <= max_norm:
        return 1.0
    return max_norm / grad_norm


def scale_gradients(parameters: Parameters, factor: float) -> None:
    """Multiply every gradient in place by ``factor``."""
    if factor == 1.0:
        return
    for name, tensor in _as_items(parameters):
        if tensor.grad is None:
            raise StateError(f"parameter '{name}' has no gradient to scale")
        tensor.grad = tensor.grad * tensor.grad.dtype.type(factor)


def zero_gradients(parameters: Parameters) -> None:
    for _, tensor in _as_items(parameters):
        tensor.grad = None
