"""Camera sampling protocols and training/eval examples."""

from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.data.image_io import quantize
from src.data.renderer import render_oracle_view
from src.data.scene import SceneSpec
from src.geometry.camera import CameraIntrinsics, CameraModel, look_at
from src.utils.errors import ConfigError, ShapeError

OBJECT_RADIUS = 2.0
DEFAULT_FOV = 60.0


class SamplingMode(str, Enum):
    """Object-centric (cameras around the scene) or scene-style (camera path)."""

    OBJECT = "object"
    SCENE = "scene"


DEFAULT_VIEWS = {SamplingMode.OBJECT: (4, 8), SamplingMode.SCENE: (2, 6)}


@dataclass
class View:
    """One posed image."""

    image: np.ndarray
    camera: CameraModel


@dataclass
class SceneExample:
    """N posed input views and M posed target views of one scene."""

    inputs: List[View]
    targets: List[View]
    scene_id: str = ""
    metadata: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.inputs:
            raise ShapeError("an example needs at least one input view")
        shapes = {v.image.shape for v in self.inputs + self.targets}
        if len(shapes) != 1:
            raise ShapeError(f"all views of an example must share one resolution, got {shapes}")

    @property
    def image_size(self) -> Tuple[int, int]:
        h, w = self.inputs[0].image.shape[:2]
        return int(h), int(w)

    @property
    def input_images(self) -> List[np.ndarray]:
        return [v.image for v in self.inputs]

    @property
    def input_cameras(self) -> List[CameraModel]:
        return [v.camera for v in self.inputs]

    @property
    def target_images(self) -> List[np.ndarray]:
        return [v.image for v in self.targets]

    @property
    def target_cameras(self) -> List[CameraModel]:
        return [v.camera for v in self.targets]

    @property
    def posed_inputs(self) -> List[Tuple[np.ndarray, CameraModel]]:
        return [(v.image, v.camera) for v in self.inputs]

    def with_inputs(self, count: int) -> "SceneExample":
        """Keep only the first ``count`` input views."""
        if not 1 <= count <= len(self.inputs):
            raise ConfigError(
                f"requested {count} input views but example '{self.scene_id}' "
                f"has {len(self.inputs)}"
            )
        return SceneExample(
            inputs=self.inputs[:count],
            targets=self.targets,
            scene_id=self.scene_id,
            metadata=dict(self.metadata),
        )


def _unit_vectors(rng: np.random.Generator, count: int) -> np.ndarray:
    out = []
    while len(out) < count:
        v = rng.normal(size=3)
        n = np.linalg.norm(v)
        if n > 1e-6:
            out.append(v / n)
    return np.stack(out)


def object_cameras(
    rng: np.random.Generator,
    count: int,
    intrinsics: CameraIntrinsics,
    radius: float = OBJECT_RADIUS,
) -> List[CameraModel]:
    """Cameras uniformly distributed on a sphere, all looking at the origin."""
    return [
        CameraModel(pose=look_at(radius * d), intrinsics=intrinsics)
        for d in _unit_vectors(rng, count)
    ]


def arc_cameras(
    rng: np.random.Generator, count: int, intrinsics: CameraIntrinsics
) -> List[CameraModel]:
    """Cameras along a smooth random arc with small look-at jitter."""
    radius = rng.uniform(1.7, 2.3)
    height = rng.uniform(-0.1, 0.6)
    start = rng.uniform(0.0, 2.0 * np.pi)
    span = np.radians(rng.uniform(50.0, 110.0))
    angles = start + np.linspace(0.0, span, count)
    cameras = []
    for angle in angles:
        eye = np.array([radius * np.cos(angle), height, radius * np.sin(angle)])
        target = rng.normal(0.0, 0.05, size=3)
        cameras.append(CameraModel(pose=look_at(eye, target), intrinsics=intrinsics))
    return cameras


def interleaved_split(total: int, num_inputs: int) -> Tuple[List[int], List[int]]:
    """Spread ``num_inputs`` indices evenly over ``range(total)``; the rest are targets."""
    if num_inputs == 1:
        inputs = [0]
    else:
        inputs = sorted({int(round(x)) for x in np.linspace(0, total - 1, num_inputs)})
    targets = [i for i in range(total) if i not in inputs]
    return inputs, targets


def sample_example(
    scene: SceneSpec,
    mode: SamplingMode = SamplingMode.OBJECT,
    num_inputs: Optional[int] = None,
    num_targets: Optional[int] = None,
    seed: int = 0,
    height: int = 32,
    width: int = 32,
    fov_degrees: float = DEFAULT_FOV,
) -> SceneExample:
    """Sample cameras for ``scene`` and render input and target views.

    Images are quantised to 8-bit levels so they survive dataset IO exactly.

    Args:
        scene: Scene to render.
        mode: Camera protocol.
        num_inputs: Input views N (mode default when ``None``).
        num_targets: Target views M (mode default when ``None``).
        seed: Sampling seed.
        height: Image rows.
        width: Image columns.
        fov_degrees: Horizontal field of view.
    """
    mode = SamplingMode(mode)
    default_n, default_m = DEFAULT_VIEWS[mode]
    n = default_n if num_inputs is None else int(num_inputs)
    m = default_m if num_targets is None else int(num_targets)
    if n < 1 or m < 1:
        raise ConfigError(f"need at least one input and one target view, got N={n}, M={m}")

    rng = np.random.default_rng(seed)
    intrinsics = CameraIntrinsics.from_fov(fov_degrees, width, height)
    if mode == SamplingMode.OBJECT:
        cameras = object_cameras(rng, n + m, intrinsics)
        input_idx, target_idx = list(range(n)), list(range(n, n + m))
    else:
        cameras = arc_cameras(rng, n + m, intrinsics)
        input_idx, target_idx = interleaved_split(n + m, n)

    def view(index: int) -> View:
        image = render_oracle_view(scene, cameras[index], height, width)
        return View(image=quantize(image), camera=cameras[index])

    return SceneExample(
        inputs=[view(i) for i in input_idx],
        targets=[view(i) for i in target_idx],
        scene_id=f"scene_{scene.seed:05d}",
        metadata={"mode": mode.value, "scene_seed": int(scene.seed), "sampling_seed": int(seed)},
    )
