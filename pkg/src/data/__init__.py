"""Synthetic scenes, the oracle renderer, view sampling and dataset IO."""

from src.data.dataset import (
    manifest_cameras,
    read_camera_manifest,
    read_dataset,
    read_example,
    write_dataset,
    write_example,
)
from src.data.image_io import load_image, quantize, save_image
from src.data.renderer import render_oracle_view
from src.data.sampling import SamplingMode, SceneExample, View, sample_example
from src.data.scene import Pattern, Primitive, PrimitiveKind, SceneSpec, generate_scene

__all__ = [
    "Pattern",
    "Primitive",
    "PrimitiveKind",
    "SamplingMode",
    "SceneExample",
    "SceneSpec",
    "View",
    "generate_scene",
    "load_image",
    "manifest_cameras",
    "quantize",
    "read_camera_manifest",
    "read_dataset",
    "read_example",
    "render_oracle_view",
    "sample_example",
    "save_image",
    "write_dataset",
    "write_example",
]
