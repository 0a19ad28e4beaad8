"""Similarity normalisation of camera sets.

The reference camera is moved to the identity pose and the scene is scaled
so the farthest camera center lies at distance 1 from the reference. The
returned transform maps any further (e.g. target) pose consistently.
"""

from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np

from src.geometry.camera import CameraModel, CameraPose

MIN_SPREAD = 1e-12


@dataclass(frozen=True, eq=False)
class SimilarityTransform:
    """World transform ``x' = scale · (rotation @ x + translation)``."""

    rotation: np.ndarray = field(default_factory=lambda: np.eye(3))
    translation: np.ndarray = field(default_factory=lambda: np.zeros(3))
    scale: float = 1.0

    def apply_to_point(self, point: np.ndarray) -> np.ndarray:
        return self.scale * (self.rotation @ np.asarray(point, dtype=np.float64) + self.translation)

    def apply_to_pose(self, pose: CameraPose) -> CameraPose:
        rotation = self.rotation @ pose.rotation
        # Re-orthonormalise to keep accumulated rounding inside the pose tolerance.
        u, _, vt = np.linalg.svd(rotation)
        return CameraPose(rotation=u @ vt, translation=self.apply_to_point(pose.translation))

    def apply_to_camera(self, camera: CameraModel) -> CameraModel:
        return camera.with_pose(self.apply_to_pose(camera.pose))

    def is_identity(self, atol: float = 1e-12) -> bool:
        return bool(
            np.allclose(self.rotation, np.eye(3), atol=atol)
            and np.allclose(self.translation, 0.0, atol=atol)
            and abs(self.scale - 1.0) <= atol
        )


def normalize_cameras(
    poses: Sequence[CameraPose], reference_index: int = 0
) -> Tuple[List[CameraPose], SimilarityTransform]:
    """Map ``poses`` so the reference is the identity and the max center distance is 1.

    Scaling is skipped when every center coincides with the reference.

    Raises:
        ValueError: If ``poses`` is empty.
        IndexError: If ``reference_index`` is out of range.
    """
    if not poses:
        raise ValueError("normalize_cameras needs at least one pose")
    if not -len(poses) <= reference_index < len(poses):
        raise IndexError(f"reference_index {reference_index} out of range for {len(poses)} poses")
    reference = poses[reference_index]
    rotation = reference.rotation.T
    translation = -rotation @ reference.translation
    spread = max(float(np.linalg.norm(p.translation - reference.translation)) for p in poses)
    scale = 1.0 / spread if spread > MIN_SPREAD else 1.0
    transform = SimilarityTransform(rotation=rotation, translation=translation, scale=scale)
    normalized = [transform.apply_to_pose(p) for p in poses]
    normalized[reference_index] = CameraPose.identity()
    return normalized, transform


def select_reference_view(poses: Sequence[CameraPose]) -> int:
    """Index of the camera nearest the centroid of all centers.

    Ties are broken by quantities measured in each camera's own frame
    (offset of the centroid along its forward and right axes), so the choice
    does not depend on input order or on a global rigid motion.
    """
    if not poses:
        raise ValueError("select_reference_view needs at least one pose")
    centers = np.stack([p.center for p in poses])
    centroid = centers.mean(axis=0)
    keys = []
    for i, pose in enumerate(poses):
        offset = centroid - pose.center
        local = pose.rotation.T @ offset
        keys.append(
            (
                round(float(np.linalg.norm(offset)), 9),
                round(-float(local[2]), 9),
                round(-float(local[0]), 9),
                round(-float(local[1]), 9),
                i,
            )
        )
    return min(keys)[-1]
