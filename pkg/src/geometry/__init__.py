"""Camera models, pose normalisation and Plücker ray maps."""

from src.geometry.camera import CameraIntrinsics, CameraModel, CameraPose, look_at
from src.geometry.normalization import (
    SimilarityTransform,
    normalize_cameras,
    select_reference_view,
)
from src.geometry.plucker import PluckerMap, camera_plucker_map, compute_plucker_map, pixel_rays

__all__ = [
    "CameraIntrinsics",
    "CameraModel",
    "CameraPose",
    "PluckerMap",
    "SimilarityTransform",
    "camera_plucker_map",
    "compute_plucker_map",
    "look_at",
    "normalize_cameras",
    "pixel_rays",
    "select_reference_view",
]
