"""Central finite-difference gradient checking.

Used by the test suite and available to anyone adding a new differentiable
op. Run checks inside :func:`~src.diffnum.precision.verification_mode` so the
perturbations are meaningful.
"""

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from src.diffnum.tensor import Tape, Tensor
from src.utils.errors import StateError

DEFAULT_STEP = 1e-4
DEFAULT_ATOL = 1e-6


@dataclass
class GradcheckResult:
    """Outcome of comparing analytic and numerical gradients.

    Attributes:
        max_rel_error: Largest relative error over all checked entries.
        per_input: Largest relative error for each input, keyed by name.
        checked: Number of entries compared.
    """

    max_rel_error: float
    per_input: Dict[str, float] = field(default_factory=dict)
    checked: int = 0

    def passed(self, tolerance: float) -> bool:
        return self.max_rel_error < tolerance


def relative_error(
    analytic: np.ndarray, numeric: np.ndarray, atol: float = DEFAULT_ATOL
) -> np.ndarray:
    """``|a - n| / max(|a|, |n|, atol)`` elementwise."""
    denom = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), atol)
    return np.abs(analytic - numeric) / denom


def numerical_gradient(
    fn: Callable[[], Tensor],
    tensor: Tensor,
    step: float = DEFAULT_STEP,
    indices: Optional[Sequence[tuple]] = None,
) -> np.ndarray:
    """Central-difference gradient of scalar ``fn()`` with respect to ``tensor``.

    Entries not listed in ``indices`` are left at zero.
    """
    original = tensor.data
    grad = np.zeros_like(original, dtype=np.float64)
    targets = indices if indices is not None else list(np.ndindex(original.shape))
    try:
        for idx in targets:
            plus = original.copy()
            plus[idx] += step
            tensor.data = plus
            f_plus = float(np.sum(fn().data, dtype=np.float64))
            minus = original.copy()
            minus[idx] -= step
            tensor.data = minus
            f_minus = float(np.sum(fn().data, dtype=np.float64))
            grad[idx] = (f_plus - f_minus) / (2.0 * step)
    finally:
        tensor.data = original
    return grad


def check_gradients(
    fn: Callable[[], Tensor],
    inputs: Sequence[Tensor],
    step: float = DEFAULT_STEP,
    atol: float = DEFAULT_ATOL,
    max_entries: Optional[int] = None,
    seed: int = 0,
) -> GradcheckResult:
    """Compare reverse-mode gradients of ``fn`` with central differences.

    Args:
        fn: Zero-argument closure returning the scalar loss; it must read the
            current ``data`` of every tensor in ``inputs``.
        inputs: Tensors to differentiate; each must have ``requires_grad``.
        step: Finite-difference step.
        atol: Floor of the relative-error denominator.
        max_entries: Check at most this many randomly chosen entries per
            input (all entries when ``None``).
        seed: Seed for the entry subset.

    Returns:
        A :class:`GradcheckResult`.
    """
    for tensor in inputs:
        if not tensor.requires_grad:
            raise StateError(f"gradcheck input {tensor!r} does not require grad")
        tensor.grad = None
    with Tape() as tape:
        loss = fn()
    tape.backward(loss)

    rng = np.random.default_rng(seed)
    result = GradcheckResult(max_rel_error=0.0)
    for i, tensor in enumerate(inputs):
        name = tensor.name or f"input[{i}]"
        analytic = tensor.grad if tensor.grad is not None else np.zeros_like(tensor.data)
        indices: List[tuple] = list(np.ndindex(tensor.shape))
        if max_entries is not None and len(indices) > max_entries:
            chosen = rng.choice(len(indices), size=max_entries, replace=False)
            indices = [indices[j] for j in sorted(chosen)]
        numeric = numerical_gradient(fn, tensor, step=step, indices=indices)
        errors = [
            float(relative_error(np.float64(analytic[idx]), numeric[idx], atol)) for idx in indices
        ]
        worst = max(errors) if errors else 0.0
        result.per_input[name] = worst
        result.max_rel_error = max(result.max_rel_error, worst)
        result.checked += len(indices)
    return result
