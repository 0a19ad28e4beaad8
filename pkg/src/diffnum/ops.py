"""Differentiable operations on :class:`~src.diffnum.tensor.Tensor`.

Every op computes its forward value with numpy and, when any operand needs a
gradient, records a backward closure on the active tape. Broadcasting follows
numpy; gradients are summed back to each operand's shape.
"""

import math
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from src.diffnum.tensor import Tensor, TensorLike, as_tensor, record_op
from src.utils.errors import ShapeError

LAYER_NORM_EPS = 1e-5
L2_NORM_EPS = 1e-12
_GELU_C = math.sqrt(2.0 / math.pi)
_GELU_K = 0.044715

Axis = Optional[Union[int, Tuple[int, ...]]]


def _unbroadcast(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    """Sum ``grad`` down to ``shape`` after numpy broadcasting."""
    if grad.shape == shape:
        return grad
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, n in enumerate(shape) if n == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad.reshape(shape)


def _broadcast_shape(op: str, a: Tensor, b: Tensor) -> None:
    try:
        np.broadcast_shapes(a.shape, b.shape)
    except ValueError as exc:
        raise ShapeError(f"{op}: shapes {a.shape} and {b.shape} do not broadcast") from exc


# --- Elementwise arithmetic ---


def add(a: TensorLike, b: TensorLike) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape("add", a, b)

    def backward(g: np.ndarray):
        return _unbroadcast(g, a.shape), _unbroadcast(g, b.shape)

    return record_op("add", a.data + b.data, (a, b), backward)


def subtract(a: TensorLike, b: TensorLike) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape("subtract", a, b)

    def backward(g: np.ndarray):
        return _unbroadcast(g, a.shape), _unbroadcast(-g, b.shape)

    return record_op("subtract", a.data - b.data, (a, b), backward)


def multiply(a: TensorLike, b: TensorLike) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape("multiply", a, b)

    def backward(g: np.ndarray):
        ga = _unbroadcast(g * b.data, a.shape) if a.requires_grad else None
        gb = _unbroadcast(g * a.data, b.shape) if b.requires_grad else None
        return ga, gb

    return record_op("multiply", a.data * b.data, (a, b), backward)


def scale(a: TensorLike, factor: float) -> Tensor:
    """Multiply by a Python scalar constant."""
    a = as_tensor(a)
    factor = float(factor)

    def backward(g: np.ndarray):
        return (g * factor,)

    return record_op("scale", a.data * a.data.dtype.type(factor), (a,), backward)


def square(a: TensorLike) -> Tensor:
    a = as_tensor(a)

    def backward(g: np.ndarray):
        return (2.0 * a.data * g,)

    return record_op("square", a.data * a.data, (a,), backward)


def absolute(a: TensorLike) -> Tensor:
    """Elementwise |a|; the subgradient at zero is taken as 0."""
    a = as_tensor(a)

    def backward(g: np.ndarray):
        return (np.sign(a.data) * g,)

    return record_op("abs", np.abs(a.data), (a,), backward)


def clip(a: TensorLike, low: float, high: float) -> Tensor:
    """Elementwise clamp to [low, high]; the gradient passes only where the input is inside."""
    a = as_tensor(a)
    if low > high:
        raise ValueError(f"clip bounds are reversed: {low} > {high}")
    inside = (a.data >= low) & (a.data <= high)

    def backward(g: np.ndarray):
        return (np.where(inside, g, 0.0).astype(g.dtype, copy=False),)

    value = np.clip(a.data, low, high).astype(a.dtype, copy=False)
    return record_op("clip", value, (a,), backward)


# --- Linear algebra ---


def matmul(a: TensorLike, b: TensorLike) -> Tensor:
    """Matrix product over the last two axes with numpy batch broadcasting."""
    a, b = as_tensor(a), as_tensor(b)
    if a.ndim < 2 or b.ndim < 2:
        raise ShapeError(f"matmul needs operands with ndim >= 2, got {a.shape} and {b.shape}")
    if a.shape[-1] != b.shape[-2]:
        raise ShapeError(f"matmul: inner dimensions differ, {a.shape} @ {b.shape}")
    try:
        value = np.matmul(a.data, b.data)
    except ValueError as exc:
        raise ShapeError(f"matmul: batch shapes {a.shape} and {b.shape} do not broadcast") from exc

    def backward(g: np.ndarray):
        ga = _unbroadcast(g @ np.swapaxes(b.data, -1, -2), a.shape) if a.requires_grad else None
        gb = _unbroadcast(np.swapaxes(a.data, -1, -2) @ g, b.shape) if b.requires_grad else None
        return ga, gb

    return record_op("matmul", value, (a, b), backward)


# --- Shape manipulation ---


def reshape(a: TensorLike, shape: Sequence[int]) -> Tensor:
    a = as_tensor(a)
    shape = tuple(int(s) for s in shape)
    try:
        value = a.data.reshape(shape)
    except ValueError as exc:
        raise ShapeError(f"cannot reshape {a.shape} into {shape}") from exc

    def backward(g: np.ndarray):
        return (g.reshape(a.shape),)

    return record_op("reshape", value, (a,), backward)


def transpose(a: TensorLike, axes: Optional[Sequence[int]] = None) -> Tensor:
    a = as_tensor(a)
    if axes is None:
        axes = tuple(reversed(range(a.ndim)))
    axes = tuple(int(x) for x in axes)
    if sorted(axes) != list(range(a.ndim)):
        raise ShapeError(f"invalid transpose axes {axes} for shape {a.shape}")
    inverse = tuple(np.argsort(axes))

    def backward(g: np.ndarray):
        return (np.transpose(g, inverse),)

    return record_op("transpose", np.transpose(a.data, axes), (a,), backward)


def concat(tensors: Sequence[TensorLike], axis: int = 0) -> Tensor:
    parts = [as_tensor(t) for t in tensors]
    if not parts:
        raise ShapeError("concat needs at least one tensor")
    try:
        value = np.concatenate([p.data for p in parts], axis=axis)
    except ValueError as exc:
        shapes = [p.shape for p in parts]
        raise ShapeError(f"concat along axis {axis} failed for shapes {shapes}") from exc
    bounds = np.cumsum([p.shape[axis] for p in parts])[:-1]

    def backward(g: np.ndarray):
        return tuple(np.split(g, bounds, axis=axis))

    return record_op("concat", value, parts, backward)


def slice_(a: TensorLike, key: object) -> Tensor:
    """Index ``a`` with any numpy key; repeated indices accumulate gradient."""
    a = as_tensor(a)
    try:
        value = a.data[key]
    except IndexError as exc:
        raise ShapeError(f"invalid index {key!r} for shape {a.shape}") from exc
    value = np.array(value, copy=True)

    def backward(g: np.ndarray):
        full = np.zeros_like(a.data)
        np.add.at(full, key, g)
        return (full,)

    return record_op("slice", value, (a,), backward)


# --- Reductions ---


def sum_(a: TensorLike, axis: Axis = None, keepdims: bool = False) -> Tensor:
    a = as_tensor(a)
    value = np.sum(a.data, axis=axis, keepdims=keepdims)

    def backward(g: np.ndarray):
        if not keepdims and axis is not None:
            g = np.expand_dims(g, axis)
        return (np.broadcast_to(g, a.shape).copy(),)

    return record_op("sum", np.asarray(value), (a,), backward)


def mean(a: TensorLike, axis: Axis = None, keepdims: bool = False) -> Tensor:
    a = as_tensor(a)
    if a.size == 0:
        raise ShapeError("mean of an empty tensor")
    value = np.mean(a.data, axis=axis, keepdims=keepdims)
    count = a.size if axis is None else int(np.prod([a.shape[i] for i in np.atleast_1d(axis)]))

    def backward(g: np.ndarray):
        if not keepdims and axis is not None:
            g = np.expand_dims(g, axis)
        return (np.broadcast_to(g / count, a.shape).copy(),)

    return record_op("mean", np.asarray(value, dtype=a.dtype), (a,), backward)


# --- Nonlinearities ---


def sigmoid(a: TensorLike) -> Tensor:
    a = as_tensor(a)
    # Split by sign so large magnitudes never overflow exp().
    x = a.data
    e = np.exp(-np.abs(x))
    y = np.where(x >= 0, 1.0 / (1.0 + e), e / (1.0 + e)).astype(x.dtype, copy=False)

    def backward(g: np.ndarray):
        return (g * y * (1.0 - y),)

    return record_op("sigmoid", y, (a,), backward)


def gelu(a: TensorLike) -> Tensor:
    """GELU, tanh approximation."""
    a = as_tensor(a)
    x = a.data
    t = np.tanh(_GELU_C * (x + _GELU_K * x**3))
    y = 0.5 * x * (1.0 + t)

    def backward(g: np.ndarray):
        dt = (1.0 - t * t) * _GELU_C * (1.0 + 3.0 * _GELU_K * x * x)
        return (g * (0.5 * (1.0 + t) + 0.5 * x * dt),)

    return record_op("gelu", y.astype(x.dtype, copy=False), (a,), backward)


def softmax(a: TensorLike) -> Tensor:
    """Softmax over the last axis."""
    a = as_tensor(a)
    if a.ndim == 0 or a.shape[-1] == 0:
        raise ShapeError(f"softmax over an empty last axis (shape {a.shape})")
    shifted = a.data - np.max(a.data, axis=-1, keepdims=True)
    e = np.exp(shifted)
    y = e / np.sum(e, axis=-1, keepdims=True)

    def backward(g: np.ndarray):
        return (y * (g - np.sum(g * y, axis=-1, keepdims=True)),)

    return record_op("softmax", y, (a,), backward)


def layer_norm_no_bias(x: TensorLike, gain: TensorLike, eps: float = LAYER_NORM_EPS) -> Tensor:
    """LayerNorm over the last axis with a learnable gain and no bias.

    A constant input normalises to zero; ``eps`` keeps the zero-variance
    case finite.
    """
    x, gain = as_tensor(x), as_tensor(gain)
    if gain.shape != (x.shape[-1],):
        raise ShapeError(f"layer norm gain shape {gain.shape} != ({x.shape[-1]},)")
    mu = np.mean(x.data, axis=-1, keepdims=True)
    centered = x.data - mu
    var = np.mean(centered * centered, axis=-1, keepdims=True)
    inv_std = 1.0 / np.sqrt(var + eps)
    xhat = centered * inv_std

    def backward(g: np.ndarray):
        gx = None
        if x.requires_grad:
            gxhat = g * gain.data
            gx = inv_std * (
                gxhat
                - np.mean(gxhat, axis=-1, keepdims=True)
                - xhat * np.mean(gxhat * xhat, axis=-1, keepdims=True)
            )
        ggain = None
        if gain.requires_grad:
            ggain = (g * xhat).reshape(-1, x.shape[-1]).sum(axis=0)
        return gx, ggain

    value = (xhat * gain.data).astype(x.dtype, copy=False)
    return record_op("layer_norm_no_bias", value, (x, gain), backward)


def l2_normalize(x: TensorLike, eps: float = L2_NORM_EPS) -> Tensor:
    """Scale each vector along the last axis to unit Euclidean length."""
    x = as_tensor(x)
    norm = np.sqrt(np.sum(x.data * x.data, axis=-1, keepdims=True) + eps)
    y = x.data / norm

    def backward(g: np.ndarray):
        return ((g - y * np.sum(g * y, axis=-1, keepdims=True)) / norm,)

    return record_op("l2_normalize", y, (x,), backward)


def linear(x: TensorLike, weight: TensorLike) -> Tensor:
    """Bias-free linear map ``x @ weight`` with weight shaped (in, out)."""
    x, weight = as_tensor(x), as_tensor(weight)
    if weight.ndim != 2 or x.shape[-1] != weight.shape[0]:
        raise ShapeError(f"linear: input {x.shape} incompatible with weight {weight.shape}")
    return matmul(x, weight)
