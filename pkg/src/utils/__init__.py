"""Utility functions and helpers.

This module provides common utilities used across the system.
"""

from src.utils.errors import (
    ConfigError,
    DatasetIOError,
    DegenerateMaskError,
    IncompatibleCheckpointError,
    InvalidIntrinsicsError,
    InvalidPoseError,
    LvsmError,
    ManifestParseError,
    NonFiniteLossError,
    ShapeError,
    StateError,
)
from src.utils.logger import get_logger, setup_logging
from src.utils.seeding import derive_seed, make_rng

__all__ = [
    "ConfigError",
    "DatasetIOError",
    "DegenerateMaskError",
    "IncompatibleCheckpointError",
    "InvalidIntrinsicsError",
    "InvalidPoseError",
    "LvsmError",
    "ManifestParseError",
    "NonFiniteLossError",
    "ShapeError",
    "StateError",
    "derive_seed",
    "get_logger",
    "make_rng",
    "setup_logging",
]
