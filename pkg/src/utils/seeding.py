"""Deterministic seed derivation from a single root seed."""

import zlib

import numpy as np

# Purposes used across the package; any string is accepted.
INIT = "init"
DATA = "data"
SAMPLING = "sampling"


def derive_seed(root_seed: int, purpose: str, *indices: int) -> int:
    """Derive a child seed for one purpose (and optional index path).

    The purpose string is hashed with CRC32 so the mapping is stable across
    processes and Python versions, unlike ``hash()``.

    Args:
        root_seed: The run's root seed.
        purpose: What the randomness is for ("init", "data", ...).
        *indices: Optional extra integers, e.g. a scene or step index.

    Returns:
        A non-negative 63-bit integer seed.
    """
    entropy = [int(root_seed) & 0xFFFFFFFF, zlib.crc32(purpose.encode("utf-8"))]
    entropy.extend(int(i) & 0xFFFFFFFF for i in indices)
    state = np.random.SeedSequence(entropy).generate_state(2, dtype=np.uint32)
    return int((int(state[0]) << 31) ^ int(state[1]))


def make_rng(root_seed: int, purpose: str, *indices: int) -> np.random.Generator:
    """Create a numpy Generator seeded by :func:`derive_seed`."""
    return np.random.default_rng(derive_seed(root_seed, purpose, *indices))
