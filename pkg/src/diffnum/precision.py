"""Process-wide floating point precision mode.

Production runs use float32. Verification mode switches every newly created
tensor to float64 so finite-difference checks and bit-exact reproducibility
tests have enough headroom.
"""

import threading
from contextlib import contextmanager
from typing import Iterator, Type

import numpy as np

_lock = threading.Lock()
_default_dtype: Type[np.floating] = np.float32


def get_default_dtype() -> Type[np.floating]:
    """Return the dtype used for new tensors and parameters."""
    return _default_dtype


def set_default_dtype(dtype: Type[np.floating]) -> None:
    """Set the dtype used for new tensors (float32 or float64)."""
    global _default_dtype
    if np.dtype(dtype) not in (np.dtype(np.float32), np.dtype(np.float64)):
        raise ValueError(f"Unsupported default dtype: {dtype}")
    with _lock:
        _default_dtype = np.dtype(dtype).type


def is_verification_mode() -> bool:
    """True when tensors default to float64."""
    return np.dtype(_default_dtype) == np.dtype(np.float64)


@contextmanager
def verification_mode() -> Iterator[None]:
    """Temporarily switch to 64-bit verification mode."""
    previous = get_default_dtype()
    set_default_dtype(np.float64)
    try:
        yield
    finally:
        set_default_dtype(previous)
