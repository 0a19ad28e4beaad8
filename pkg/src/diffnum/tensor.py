"""Dense tensors and the reverse-mode tape that records operations on them."""

from contextvars import ContextVar
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from src.diffnum.precision import get_default_dtype
from src.utils.errors import ShapeError, StateError

ArrayLike = Union[np.ndarray, float, int, Sequence]
BackwardFn = Callable[[np.ndarray], Sequence[Optional[np.ndarray]]]

_active_tape: ContextVar[Optional["Tape"]] = ContextVar("lvsm_active_tape", default=None)


class Tensor:
    """A dense n-dimensional array with an optional gradient.

    Attributes:
        data: The underlying numpy array (float32 or float64).
        requires_grad: Whether gradients should be accumulated into ``grad``.
        grad: Accumulated gradient, same shape as ``data``; ``None`` until a
            backward pass reaches this tensor.
        name: Optional label used in diagnostics.
    """

    __slots__ = ("data", "requires_grad", "grad", "name")

    def __init__(
        self,
        data: ArrayLike,
        requires_grad: bool = False,
        name: Optional[str] = None,
        dtype: Optional[type] = None,
    ) -> None:
        if isinstance(data, Tensor):
            data = data.data
        array = np.asarray(data)
        if dtype is not None:
            array = array.astype(dtype, copy=False)
        elif not np.issubdtype(array.dtype, np.floating):
            array = array.astype(get_default_dtype())
        self.data: np.ndarray = array
        self.requires_grad = requires_grad
        self.grad: Optional[np.ndarray] = None
        self.name = name

    # --- Introspection ---

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(self.data.shape)

    @property
    def ndim(self) -> int:
        return int(self.data.ndim)

    @property
    def size(self) -> int:
        return int(self.data.size)

    @property
    def dtype(self) -> np.dtype:
        return self.data.dtype

    def item(self) -> float:
        """Return the value of a single-element tensor as a Python float."""
        if self.data.size != 1:
            raise ShapeError(f"item() needs a single element, got shape {self.shape}")
        return float(self.data.reshape(()))

    def numpy(self) -> np.ndarray:
        """Return a copy of the data."""
        return np.array(self.data, copy=True)

    def detach(self) -> "Tensor":
        """Return a tensor sharing data but excluded from gradient tracking."""
        return Tensor(self.data, requires_grad=False, name=self.name)

    def zero_grad(self) -> None:
        self.grad = None

    def __repr__(self) -> str:
        label = f" name={self.name!r}" if self.name else ""
        return f"Tensor(shape={self.shape}, dtype={self.dtype}{label})"

    # --- Operator sugar (implemented in ops) ---

    def __add__(self, other: "TensorLike") -> "Tensor":
        from src.diffnum import ops

        return ops.add(self, other)

    __radd__ = __add__

    def __sub__(self, other: "TensorLike") -> "Tensor":
        from src.diffnum import ops

        return ops.subtract(self, other)

    def __rsub__(self, other: "TensorLike") -> "Tensor":
        from src.diffnum import ops

        return ops.subtract(other, self)

    def __mul__(self, other: "TensorLike") -> "Tensor":
        from src.diffnum import ops

        return ops.multiply(self, other)

    __rmul__ = __mul__

    def __neg__(self) -> "Tensor":
        from src.diffnum import ops

        return ops.scale(self, -1.0)

    def __matmul__(self, other: "Tensor") -> "Tensor":
        from src.diffnum import ops

        return ops.matmul(self, other)

    def __getitem__(self, key: object) -> "Tensor":
        from src.diffnum import ops

        return ops.slice_(self, key)

    def reshape(self, *shape: int) -> "Tensor":
        from src.diffnum import ops

        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        return ops.reshape(self, shape)

    def transpose(self, *axes: int) -> "Tensor":
        from src.diffnum import ops

        return ops.transpose(self, axes or None)


TensorLike = Union[Tensor, np.ndarray, float, int]


def as_tensor(value: TensorLike) -> Tensor:
    """Wrap constants as non-differentiable tensors; pass tensors through."""
    if isinstance(value, Tensor):
        return value
    if isinstance(value, (bool, int, float)):
        # Python scalars follow the working precision, like numpy's weak scalars.
        return Tensor(np.asarray(value, dtype=get_default_dtype()))
    array = np.asarray(value)
    if not np.issubdtype(array.dtype, np.floating):
        array = array.astype(get_default_dtype())
    return Tensor(array)


@dataclass
class TapeNode:
    """One recorded operation.

    Attributes:
        op: Operation name, for diagnostics.
        inputs: Operand tensors, in call order.
        output: The tensor the operation produced.
        backward: Maps the output gradient to one gradient per input
            (``None`` for inputs that need none). Saved activations live in
            the closure.
    """

    op: str
    inputs: Tuple[Tensor, ...]
    output: Tensor
    backward: BackwardFn


class Tape:
    """Records differentiable operations in execution order.

    Use as a context manager; every op executed inside the block whose output
    requires a gradient is appended. ``backward`` walks the nodes in reverse
    order (execution order is a topological order), visiting each exactly
    once, and accumulates gradients into leaf tensors.

    A tape is owned by one thread of control; the active tape is tracked with
    a context variable so concurrent workers each see their own.
    """

    def __init__(self) -> None:
        self._nodes: List[TapeNode] = []
        self._token = None

    def __enter__(self) -> "Tape":
        self._token = _active_tape.set(self)
        return self

    def __exit__(self, *exc: object) -> None:
        if self._token is not None:
            _active_tape.reset(self._token)
            self._token = None

    @property
    def nodes(self) -> List[TapeNode]:
        return list(self._nodes)

    def __len__(self) -> int:
        return len(self._nodes)

    def record(self, node: TapeNode) -> None:
        self._nodes.append(node)

    def backward(self, loss: Tensor, grad: Optional[np.ndarray] = None) -> None:
        """Back-propagate from ``loss`` and accumulate gradients into leaves.

        Args:
            loss: The tensor to differentiate; usually a scalar.
            grad: Seed gradient; defaults to ones shaped like ``loss``.

        Raises:
            StateError: If ``loss`` does not depend on any tracked tensor.
        """
        if not loss.requires_grad:
            raise StateError("backward() called on a tensor that does not require grad")
        seed = np.ones_like(loss.data) if grad is None else np.asarray(grad, dtype=loss.dtype)
        if seed.shape != loss.data.shape:
            raise ShapeError(f"seed gradient shape {seed.shape} != loss shape {loss.shape}")

        pending: Dict[int, np.ndarray] = {id(loss): seed}
        tensors: Dict[int, Tensor] = {id(loss): loss}
        produced = set()

        for node in reversed(self._nodes):
            produced.add(id(node.output))
            out_grad = pending.pop(id(node.output), None)
            if out_grad is None:
                continue
            input_grads = node.backward(out_grad)
            for tensor, g in zip(node.inputs, input_grads):
                if g is None or not tensor.requires_grad:
                    continue
                key = id(tensor)
                tensors[key] = tensor
                if key in pending:
                    pending[key] = pending[key] + g
                else:
                    pending[key] = g

        for key, g in pending.items():
            if key in produced:
                continue
            leaf = tensors[key]
            g = g.astype(leaf.dtype, copy=False)
            leaf.grad = g if leaf.grad is None else leaf.grad + g


def active_tape() -> Optional[Tape]:
    """Return the tape currently recording, if any."""
    return _active_tape.get()


def record_op(
    op: str,
    value: np.ndarray,
    inputs: Sequence[Tensor],
    backward: BackwardFn,
) -> Tensor:
    """Wrap an op result and record it on the active tape when needed."""
    requires_grad = any(t.requires_grad for t in inputs)
    out = Tensor(value, requires_grad=requires_grad)
    tape = _active_tape.get()
    if requires_grad and tape is not None:
        tape.record(TapeNode(op=op, inputs=tuple(inputs), output=out, backward=backward))
    elif requires_grad:
        # Nothing will ever back-propagate through this result.
        out.requires_grad = False
    return out
