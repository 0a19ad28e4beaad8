"""Dataset directories.

Layout::

    <root>/
        scene_00000/
            cameras.json
            input_000.ppm
            target_000.ppm
            ...

``cameras.json`` lists every view with its role, image file, intrinsics
(fx, fy, cx, cy, width, height) and a row-major 3×4 camera-to-world matrix.
External datasets in the same layout can be dropped in; PNG images are
accepted as well as PPM.
"""

import json
from pathlib import Path
from typing import List, Literal, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from src.data.image_io import load_image, save_image
from src.data.sampling import SceneExample, View
from src.geometry.camera import CameraIntrinsics, CameraModel, CameraPose
from src.utils.errors import (
    DatasetIOError,
    InvalidIntrinsicsError,
    InvalidPoseError,
    ManifestParseError,
)
from src.utils.logger import get_logger

logger = get_logger(__name__)

MANIFEST_NAME = "cameras.json"
MANIFEST_FORMAT = "lvsm-cameras/1"


class IntrinsicsEntry(BaseModel):
    model_config = ConfigDict(extra="forbid")

    fx: float
    fy: float
    cx: float
    cy: float
    width: int = Field(..., ge=1)
    height: int = Field(..., ge=1)


class ViewEntry(BaseModel):
    """One view in a camera manifest."""

    model_config = ConfigDict(extra="forbid")

    role: Literal["input", "target"]
    image: str = ""
    intrinsics: IntrinsicsEntry
    camera_to_world: List[List[float]] = Field(..., min_length=3, max_length=3)


class CameraManifest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    format: str = MANIFEST_FORMAT
    scene_id: str = ""
    views: List[ViewEntry] = Field(..., min_length=1)


def camera_to_entry(camera: CameraModel, role: str, image: str) -> ViewEntry:
    matrix = camera.pose.matrix()[:3, :]
    return ViewEntry(
        role=role,  # type: ignore[arg-type]
        image=image,
        intrinsics=IntrinsicsEntry(**camera.intrinsics.to_dict()),
        camera_to_world=[[float(x) for x in row] for row in matrix],
    )


def entry_to_camera(entry: ViewEntry, path: Path, index: int) -> CameraModel:
    """Build a camera from a manifest entry; invalid values become parse errors."""
    matrix = np.asarray(entry.camera_to_world, dtype=np.float64)
    if matrix.shape != (3, 4):
        raise ManifestParseError(
            str(path), f"views.{index}.camera_to_world must be 3x4, got {list(matrix.shape)}"
        )
    try:
        pose = CameraPose(rotation=matrix[:, :3], translation=matrix[:, 3])
        intrinsics = CameraIntrinsics(**entry.intrinsics.model_dump())
    except (InvalidPoseError, InvalidIntrinsicsError) as exc:
        raise ManifestParseError(str(path), f"views.{index}: {exc}") from exc
    return CameraModel(pose=pose, intrinsics=intrinsics)


def read_camera_manifest(path: Union[str, Path]) -> CameraManifest:
    """Parse and validate a ``cameras.json`` file.

    Raises:
        DatasetIOError: If the file cannot be read.
        ManifestParseError: On a JSON syntax error (with line) or a schema
            violation (with the offending field path).
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DatasetIOError(str(path), f"cannot read manifest ({exc.strerror or exc})") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ManifestParseError(str(path), exc.msg, line=exc.lineno) from exc
    try:
        return CameraManifest.model_validate(raw)
    except ValidationError as exc:
        first = exc.errors()[0]
        loc = ".".join(str(part) for part in first["loc"]) or "<root>"
        raise ManifestParseError(str(path), f"{loc}: {first['msg']}") from exc


def manifest_cameras(path: Union[str, Path]) -> List[Tuple[str, str, CameraModel]]:
    """(role, image name, camera) for every view of a manifest."""
    path = Path(path)
    manifest = read_camera_manifest(path)
    return [
        (entry.role, entry.image, entry_to_camera(entry, path, i))
        for i, entry in enumerate(manifest.views)
    ]


def write_camera_manifest(path: Union[str, Path], manifest: CameraManifest) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(manifest.model_dump(mode="json"), indent=2) + "\n", encoding="utf-8")
    return path


def write_example(example: SceneExample, directory: Union[str, Path]) -> Path:
    """Write one example into ``directory`` (created if needed)."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    entries = []
    for role, views in (("input", example.inputs), ("target", example.targets)):
        for i, view in enumerate(views):
            name = f"{role}_{i:03d}.ppm"
            save_image(directory / name, view.image)
            entries.append(camera_to_entry(view.camera, role, name))
    manifest = CameraManifest(scene_id=example.scene_id or directory.name, views=entries)
    write_camera_manifest(directory / MANIFEST_NAME, manifest)
    return directory


def read_example(directory: Union[str, Path]) -> SceneExample:
    directory = Path(directory)
    manifest_path = directory / MANIFEST_NAME
    if not manifest_path.is_file():
        raise DatasetIOError(str(manifest_path), "manifest not found")
    manifest = read_camera_manifest(manifest_path)
    inputs, targets = [], []
    for i, entry in enumerate(manifest.views):
        camera = entry_to_camera(entry, manifest_path, i)
        if not entry.image:
            raise ManifestParseError(str(manifest_path), f"views.{i}.image: missing image name")
        image = load_image(
            directory / entry.image, expected_size=(entry.intrinsics.height, entry.intrinsics.width)
        )
        (inputs if entry.role == "input" else targets).append(View(image=image, camera=camera))
    if not inputs:
        raise ManifestParseError(str(manifest_path), "views: no input views")
    scene_id = manifest.scene_id or directory.name
    return SceneExample(inputs=inputs, targets=targets, scene_id=scene_id)


def write_dataset(examples: Sequence[SceneExample], directory: Union[str, Path]) -> Path:
    """Write ``examples`` as ``scene_XXXXX`` subdirectories of ``directory``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for index, example in enumerate(examples):
        write_example(example, directory / f"scene_{index:05d}")
    logger.info(f"Wrote {len(examples)} examples to {directory}")
    return directory


def read_dataset(directory: Union[str, Path]) -> List[SceneExample]:
    """Read every scene subdirectory (sorted by name) of a dataset directory."""
    directory = Path(directory)
    if not directory.is_dir():
        raise DatasetIOError(str(directory), "dataset directory not found")
    scene_dirs = sorted(p for p in directory.iterdir() if (p / MANIFEST_NAME).is_file())
    if not scene_dirs:
        raise DatasetIOError(str(directory), f"no scene directories with {MANIFEST_NAME}")
    examples = [read_example(p) for p in scene_dirs]
    logger.info(f"Read {len(examples)} examples from {directory}")
    return examples
