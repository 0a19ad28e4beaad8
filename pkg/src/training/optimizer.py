"""AdamW with decoupled weight decay."""

from typing import Callable, Dict, Mapping, Optional

import numpy as np

from src.diffnum.tensor import Tensor
from src.model.weights import is_decay_exempt
from src.utils.errors import ShapeError, StateError


class AdamW:
    """Adam with bias-corrected moments and decoupled weight decay.

    Per parameter, one update is::

        p ← p · (1 − lr · wd)            (skipped for decay-exempt parameters)
        m ← β1 m + (1 − β1) g
        v ← β2 v + (1 − β2) g²
        p ← p − lr / (1 − β1ᵗ) · m / (√v / √(1 − β2ᵗ) + ε)

    Moments are keyed by parameter name and created lazily as zeros.
    """

    def __init__(
        self,
        beta1: float = 0.9,
        beta2: float = 0.95,
        eps: float = 1e-8,
        weight_decay: float = 0.05,
        decay_exempt: Callable[[str], bool] = is_decay_exempt,
    ) -> None:
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.weight_decay = weight_decay
        self.decay_exempt = decay_exempt
        self.t = 0
        self.exp_avg: Dict[str, np.ndarray] = {}
        self.exp_avg_sq: Dict[str, np.ndarray] = {}

    def step(self, parameters: Mapping[str, Tensor], lr: float) -> None:
        """Apply one update in place using each parameter's ``grad``."""
        missing = [name for name, p in parameters.items() if p.grad is None]
        if missing:
            raise StateError(f"AdamW step with missing gradients: {missing[:5]}")
        self.t += 1
        bias_correction1 = 1.0 - self.beta1**self.t
        bias_correction2 = 1.0 - self.beta2**self.t
        step_size = lr / bias_correction1

        for name, param in parameters.items():
            grad = param.grad
            if name not in self.exp_avg:
                self.exp_avg[name] = np.zeros_like(param.data)
                self.exp_avg_sq[name] = np.zeros_like(param.data)
            m = self.exp_avg[name]
            v = self.exp_avg_sq[name]
            m *= self.beta1
            m += (1.0 - self.beta1) * grad
            v *= self.beta2
            v += (1.0 - self.beta2) * grad * grad
            denom = np.sqrt(v) / np.sqrt(bias_correction2) + self.eps

            data = param.data
            if self.weight_decay and not self.decay_exempt(name):
                data = data * (1.0 - lr * self.weight_decay)
            param.data = (data - step_size * m / denom).astype(param.data.dtype, copy=False)

    def state_dict(self) -> Dict[str, np.ndarray]:
        """Moments as flat ``m.<name>`` / ``v.<name>`` arrays."""
        state = {f"m.{k}": v.copy() for k, v in self.exp_avg.items()}
        state.update({f"v.{k}": v.copy() for k, v in self.exp_avg_sq.items()})
        return state

    def load_state_dict(
        self,
        state: Mapping[str, np.ndarray],
        t: int,
        parameters: Optional[Mapping[str, Tensor]] = None,
    ) -> None:
        """Restore moments saved by :meth:`state_dict` and the step counter ``t``."""
        self.t = int(t)
        self.exp_avg = {k[2:]: np.array(v) for k, v in state.items() if k.startswith("m.")}
        self.exp_avg_sq = {k[2:]: np.array(v) for k, v in state.items() if k.startswith("v.")}
        if parameters is not None:
            for name, arr in list(self.exp_avg.items()) + list(self.exp_avg_sq.items()):
                if name not in parameters:
                    raise StateError(f"optimizer state for unknown parameter '{name}'")
                if arr.shape != parameters[name].shape:
                    raise ShapeError(
                        f"optimizer moment for '{name}' has shape {arr.shape}, "
                        f"parameter has {parameters[name].shape}"
                    )


def adamw_step(
    optimizer: AdamW, parameters: Mapping[str, Tensor], lr: float
) -> AdamW:
    """Functional spelling of :meth:`AdamW.step`."""
    optimizer.step(parameters, lr)
    return optimizer
