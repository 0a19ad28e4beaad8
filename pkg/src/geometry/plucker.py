"""Pixel-wise Plücker ray embeddings."""

from dataclasses import dataclass

import numpy as np

from src.geometry.camera import CameraIntrinsics, CameraModel, CameraPose
from src.utils.errors import ShapeError

PLUCKER_CHANNELS = 6


@dataclass(frozen=True, eq=False)
class PluckerMap:
    """Per-pixel ray embedding of shape (H, W, 6).

    Channels 0-2 hold the unit world-frame ray direction ``d``; channels 3-5
    hold the moment ``m = o × d`` for camera center ``o``.
    """

    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 3 or values.shape[-1] != PLUCKER_CHANNELS:
            raise ShapeError(f"Plücker map must be (H, W, 6), got {values.shape}")
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def height(self) -> int:
        return int(self.values.shape[0])

    @property
    def width(self) -> int:
        return int(self.values.shape[1])

    @property
    def directions(self) -> np.ndarray:
        return self.values[..., :3]

    @property
    def moments(self) -> np.ndarray:
        return self.values[..., 3:]


def pixel_rays(pose: CameraPose, intr: CameraIntrinsics, height: int, width: int) -> np.ndarray:
    """Unit world-frame ray directions through every pixel center, shape (H, W, 3)."""
    if height < 1 or width < 1:
        raise ShapeError(f"ray map size must be positive, got {height}x{width}")
    intr = intr.scaled_to(width, height)
    u = np.arange(width, dtype=np.float64) + 0.5
    v = np.arange(height, dtype=np.float64) + 0.5
    uu, vv = np.meshgrid(u, v, indexing="xy")
    cam_dirs = np.stack(
        [(uu - intr.cx) / intr.fx, (vv - intr.cy) / intr.fy, np.ones_like(uu)], axis=-1
    )
    world = cam_dirs @ pose.rotation.T
    return world / np.linalg.norm(world, axis=-1, keepdims=True)


def compute_plucker_map(
    pose: CameraPose, intr: CameraIntrinsics, height: int, width: int
) -> PluckerMap:
    """Compute the Plücker embedding (d, o × d) for every pixel of a view.

    Pose and intrinsics invariants are enforced when those objects are
    constructed, so an invalid rotation or focal length never reaches here.
    If ``height``/``width`` differ from the intrinsics' image size the
    intrinsics are rescaled proportionally.

    Args:
        pose: Camera-to-world pose.
        intr: Pinhole intrinsics.
        height: Output rows.
        width: Output columns.

    Returns:
        A :class:`PluckerMap` of shape (height, width, 6).
    """
    directions = pixel_rays(pose, intr, height, width)
    origin = np.broadcast_to(pose.center, directions.shape)
    moments = np.cross(origin, directions)
    return PluckerMap(values=np.concatenate([directions, moments], axis=-1))


def camera_plucker_map(camera: CameraModel, height: int, width: int) -> PluckerMap:
    return compute_plucker_map(camera.pose, camera.intrinsics, height, width)
