"""Pinhole camera types.

Convention: camera frame x-right, y-down, z-forward; poses are stored
camera-to-world, so ``rotation`` maps camera-frame directions to world-frame
directions and ``translation`` is the camera center in world units.
"""

from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence

import numpy as np

from src.utils.errors import InvalidIntrinsicsError, InvalidPoseError

ORTHONORMAL_TOL = 1e-6
WORLD_UP = np.array([0.0, 1.0, 0.0])
_ALTERNATE_UP = np.array([0.0, 0.0, 1.0])


def _frozen(array: np.ndarray) -> np.ndarray:
    out = np.array(array, dtype=np.float64, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class CameraIntrinsics:
    """Pinhole intrinsics in pixels for an image of ``width`` × ``height``."""

    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int

    def __post_init__(self) -> None:
        if not (np.isfinite(self.fx) and np.isfinite(self.fy)) or self.fx <= 0 or self.fy <= 0:
            raise InvalidIntrinsicsError(
                f"focal lengths must be positive, got fx={self.fx}, fy={self.fy}"
            )
        if self.width < 1 or self.height < 1:
            raise InvalidIntrinsicsError(
                f"image size must be positive, got {self.width}x{self.height}"
            )
        if not 0 < self.cx < self.width or not 0 < self.cy < self.height:
            raise InvalidIntrinsicsError(
                f"principal point ({self.cx}, {self.cy}) outside image {self.width}x{self.height}"
            )

    @classmethod
    def from_fov(cls, fov_degrees: float, width: int, height: int) -> "CameraIntrinsics":
        """Square-pixel intrinsics with horizontal field of view ``fov_degrees``."""
        if not 0 < fov_degrees < 180:
            raise InvalidIntrinsicsError(f"field of view must be in (0, 180), got {fov_degrees}")
        focal = 0.5 * width / np.tan(np.radians(fov_degrees) / 2.0)
        return cls(fx=focal, fy=focal, cx=width / 2.0, cy=height / 2.0, width=width, height=height)

    def scaled_to(self, width: int, height: int) -> "CameraIntrinsics":
        """Rescale proportionally for a different output resolution."""
        if width == self.width and height == self.height:
            return self
        sx = width / self.width
        sy = height / self.height
        return CameraIntrinsics(
            fx=self.fx * sx,
            fy=self.fy * sy,
            cx=self.cx * sx,
            cy=self.cy * sy,
            width=width,
            height=height,
        )

    def matrix(self) -> np.ndarray:
        return np.array([[self.fx, 0.0, self.cx], [0.0, self.fy, self.cy], [0.0, 0.0, 1.0]])

    def to_dict(self) -> Dict[str, float]:
        return {
            "fx": float(self.fx),
            "fy": float(self.fy),
            "cx": float(self.cx),
            "cy": float(self.cy),
            "width": int(self.width),
            "height": int(self.height),
        }


@dataclass(frozen=True, eq=False)
class CameraPose:
    """Camera-to-world rigid transform.

    Attributes:
        rotation: 3×3 proper orthonormal matrix (camera → world).
        translation: Camera center in world coordinates.
    """

    rotation: np.ndarray
    translation: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self) -> None:
        rotation = np.asarray(self.rotation, dtype=np.float64)
        translation = np.asarray(self.translation, dtype=np.float64).reshape(-1)
        if rotation.shape != (3, 3):
            raise InvalidPoseError(f"rotation must be 3x3, got shape {rotation.shape}")
        if translation.shape != (3,):
            raise InvalidPoseError(
                f"translation must have 3 entries, got shape {translation.shape}"
            )
        if not (np.all(np.isfinite(rotation)) and np.all(np.isfinite(translation))):
            raise InvalidPoseError("pose contains non-finite values")
        ortho_err = float(np.max(np.abs(rotation.T @ rotation - np.eye(3))))
        if ortho_err > ORTHONORMAL_TOL:
            raise InvalidPoseError(
                f"rotation is not orthonormal (max |RᵀR - I| = {ortho_err:.3e})"
            )
        det = float(np.linalg.det(rotation))
        if abs(det - 1.0) > ORTHONORMAL_TOL:
            raise InvalidPoseError(f"rotation determinant is {det:.6f}, expected +1")
        object.__setattr__(self, "rotation", _frozen(rotation))
        object.__setattr__(self, "translation", _frozen(translation))

    @classmethod
    def identity(cls) -> "CameraPose":
        return cls(rotation=np.eye(3), translation=np.zeros(3))

    @property
    def center(self) -> np.ndarray:
        return self.translation

    def matrix(self) -> np.ndarray:
        """Return the 4×4 homogeneous camera-to-world matrix."""
        out = np.eye(4)
        out[:3, :3] = self.rotation
        out[:3, 3] = self.translation
        return out

    def inverse_matrix(self) -> np.ndarray:
        """Return the 4×4 world-to-camera matrix."""
        out = np.eye(4)
        out[:3, :3] = self.rotation.T
        out[:3, 3] = -self.rotation.T @ self.translation
        return out

    def allclose(self, other: "CameraPose", atol: float = 1e-6) -> bool:
        return bool(
            np.allclose(self.rotation, other.rotation, atol=atol)
            and np.allclose(self.translation, other.translation, atol=atol)
        )


@dataclass(frozen=True, eq=False)
class CameraModel:
    """Extrinsics plus intrinsics for one view."""

    pose: CameraPose
    intrinsics: CameraIntrinsics

    def with_pose(self, pose: CameraPose) -> "CameraModel":
        return CameraModel(pose=pose, intrinsics=self.intrinsics)


def look_at(
    eye: Sequence[float],
    target: Sequence[float] = (0.0, 0.0, 0.0),
    up: Optional[Sequence[float]] = None,
) -> CameraPose:
    """Build a camera-to-world pose at ``eye`` whose +z axis points at ``target``.

    The image "down" axis (+y) is aligned against ``up`` (default world +y).
    If the viewing direction is parallel to ``up``, world +z is used instead.
    """
    eye = np.asarray(eye, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    up_vec = WORLD_UP if up is None else np.asarray(up, dtype=np.float64)
    forward = target - eye
    dist = np.linalg.norm(forward)
    if dist < 1e-12:
        raise InvalidPoseError("look_at: eye and target coincide")
    forward = forward / dist
    right = np.cross(forward, up_vec)
    if np.linalg.norm(right) < 1e-9:
        right = np.cross(forward, _ALTERNATE_UP)
    right = right / np.linalg.norm(right)
    down = np.cross(forward, right)
    rotation = np.stack([right, down, forward], axis=1)
    return CameraPose(rotation=rotation, translation=eye)
