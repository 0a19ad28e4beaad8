"""Analytic ray-casting renderer for :class:`SceneSpec` scenes.

Nearest-hit visibility with two-sided Lambertian shading
``max(0, n·L)·albedo + ambient·albedo``; rays that hit nothing take the
background color. No shadows or interreflection.

The ambient term (``SceneSpec.ambient``, 0.1) is light, so it is scaled by the
surface albedo like the diffuse term rather than added as a flat grey offset.
"""

from typing import Tuple

import numpy as np

from src.data.scene import Pattern, Primitive, PrimitiveKind, SceneSpec
from src.geometry.camera import CameraModel
from src.geometry.plucker import pixel_rays

HIT_EPS = 1e-9


def _intersect_ground(
    prim: Primitive, origin: np.ndarray, dirs: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    cy = prim.center[1]
    dy = dirs[:, 1]
    with np.errstate(divide="ignore", invalid="ignore"):
        t = (cy - origin[1]) / dy
    points = origin + t[:, None] * dirs
    inside = (
        (np.abs(points[:, 0] - prim.center[0]) <= prim.size[0])
        & (np.abs(points[:, 2] - prim.center[2]) <= prim.size[2])
    )
    t = np.where((np.abs(dy) > HIT_EPS) & (t > HIT_EPS) & inside, t, np.inf)
    normals = np.tile(np.array([0.0, 1.0, 0.0]), (dirs.shape[0], 1))
    return t, normals


def _intersect_sphere(
    prim: Primitive, origin: np.ndarray, dirs: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    center = np.asarray(prim.center)
    radius = prim.size[0]
    oc = origin - center
    b = dirs @ oc
    c = float(oc @ oc) - radius * radius
    disc = b * b - c
    root = np.sqrt(np.maximum(disc, 0.0))
    t_near = -b - root
    t_far = -b + root
    t = np.where(t_near > HIT_EPS, t_near, t_far)
    t = np.where((disc >= 0.0) & (t > HIT_EPS), t, np.inf)
    with np.errstate(invalid="ignore"):
        normals = (origin + t[:, None] * dirs - center) / radius
    return t, normals


def _intersect_box(
    prim: Primitive, origin: np.ndarray, dirs: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    center = np.asarray(prim.center)
    half = np.asarray(prim.size)
    with np.errstate(divide="ignore", invalid="ignore"):
        inv = 1.0 / dirs
        t0 = (center - half - origin) * inv
        t1 = (center + half - origin) * inv
    t_min = np.nanmax(np.minimum(t0, t1), axis=1)
    t_max = np.nanmin(np.maximum(t0, t1), axis=1)
    t = np.where(t_min > HIT_EPS, t_min, t_max)
    t = np.where((t_max >= t_min) & (t > HIT_EPS), t, np.inf)
    with np.errstate(invalid="ignore"):
        local = (origin + t[:, None] * dirs - center) / half
    axis = np.argmax(np.abs(np.nan_to_num(local)), axis=1)
    normals = np.zeros_like(dirs)
    rows = np.arange(dirs.shape[0])
    normals[rows, axis] = np.sign(local[rows, axis])
    return t, normals


_INTERSECTORS = {
    PrimitiveKind.GROUND: _intersect_ground,
    PrimitiveKind.SPHERE: _intersect_sphere,
    PrimitiveKind.BOX: _intersect_box,
}


def _albedo(prim: Primitive, points: np.ndarray) -> np.ndarray:
    base = np.asarray(prim.albedo, dtype=np.float64)
    if prim.pattern == Pattern.FLAT:
        return np.broadcast_to(base, points.shape).copy()
    alt = np.asarray(prim.albedo_alt, dtype=np.float64)
    cells = np.floor(points * prim.checker_cells + 1e-7)
    if prim.kind == PrimitiveKind.GROUND:
        parity = (cells[:, 0] + cells[:, 2]) % 2
    else:
        parity = cells.sum(axis=1) % 2
    return np.where(parity[:, None] == 0, base, alt)


def render_oracle_view(
    scene: SceneSpec, camera: CameraModel, height: int, width: int
) -> np.ndarray:
    """Render ``scene`` from ``camera`` as an (H, W, 3) float64 image in [0, 1]."""
    dirs = pixel_rays(camera.pose, camera.intrinsics, height, width).reshape(-1, 3)
    origin = np.asarray(camera.pose.center, dtype=np.float64)
    count = dirs.shape[0]

    best_t = np.full(count, np.inf)
    best_prim = np.full(count, -1, dtype=np.int64)
    best_normal = np.zeros((count, 3))
    for index, prim in enumerate(scene.primitives):
        t, normals = _INTERSECTORS[prim.kind](prim, origin, dirs)
        closer = t < best_t
        best_t = np.where(closer, t, best_t)
        best_prim = np.where(closer, index, best_prim)
        best_normal = np.where(closer[:, None], normals, best_normal)

    image = np.broadcast_to(np.asarray(scene.background, dtype=np.float64), (count, 3)).copy()
    hit = best_prim >= 0
    if np.any(hit):
        normal = best_normal[hit]
        # Two-sided surfaces: face the normal toward the viewer.
        facing = np.sum(normal * dirs[hit], axis=1) > 0
        normal[facing] *= -1.0
        points = origin + best_t[hit, None] * dirs[hit]
        diffuse = np.maximum(0.0, normal @ scene.light)
        albedo = np.zeros((int(hit.sum()), 3))
        for index, prim in enumerate(scene.primitives):
            sel = best_prim[hit] == index
            if np.any(sel):
                albedo[sel] = _albedo(prim, points[sel])
        image[hit] = albedo * (diffuse + scene.ambient)[:, None]
    return np.clip(image, 0.0, 1.0).reshape(height, width, 3)
