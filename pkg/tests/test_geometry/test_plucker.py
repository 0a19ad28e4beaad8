"""Tests for Plücker ray maps."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.geometry.camera import CameraIntrinsics, CameraModel, CameraPose
from src.geometry.plucker import (
    PluckerMap,
    camera_plucker_map,
    compute_plucker_map,
    pixel_rays,
)
from src.utils.errors import ShapeError
from tests.test_geometry.test_camera import random_rotation

CENTERED = CameraIntrinsics(fx=4.0, fy=4.0, cx=2.5, cy=2.5, width=5, height=5)


class TestPluckerMap:

    def test_identity_principal_point(self) -> None:
        pmap = compute_plucker_map(CameraPose.identity(), CENTERED, 5, 5)
        np.testing.assert_allclose(pmap.values[2, 2], [0, 0, 1, 0, 0, 0], atol=1e-15)

    def test_translated_principal_point(self) -> None:
        pose = CameraPose(np.eye(3), np.array([1.0, 0.0, 0.0]))
        pmap = compute_plucker_map(pose, CENTERED, 5, 5)
        np.testing.assert_allclose(pmap.directions[2, 2], [0.0, 0.0, 1.0], atol=1e-15)
        np.testing.assert_allclose(pmap.moments[2, 2], [0.0, -1.0, 0.0], atol=1e-15)

    def test_pixel_right_of_center_points_right(self) -> None:
        rays = pixel_rays(CameraPose.identity(), CENTERED, 5, 5)
        assert rays[2, 4, 0] > 0.0
        assert rays[4, 2, 1] > 0.0

    @settings(max_examples=25, deadline=None)
    @given(st.integers(min_value=0, max_value=10_000))
    def test_unit_direction_and_orthogonal_moment(self, seed: int) -> None:
        rng = np.random.default_rng(seed)
        pose = CameraPose(random_rotation(rng), rng.normal(scale=3.0, size=3))
        intr = CameraIntrinsics(
            fx=rng.uniform(2, 20),
            fy=rng.uniform(2, 20),
            cx=rng.uniform(1, 7),
            cy=rng.uniform(1, 5),
            width=8,
            height=6,
        )
        pmap = compute_plucker_map(pose, intr, 6, 8)
        d, m = pmap.directions, pmap.moments
        np.testing.assert_allclose(np.linalg.norm(d, axis=-1), 1.0, atol=1e-12)
        np.testing.assert_allclose(np.sum(d * m, axis=-1), 0.0, atol=1e-9)
        # Any point on the ray has the same moment.
        point = pose.center + 2.7 * d
        np.testing.assert_allclose(np.cross(point, d), m, atol=1e-9)

    def test_resolution_change_rescales_intrinsics(self) -> None:
        intr = CameraIntrinsics(fx=20.0, fy=16.0, cx=8.0, cy=6.0, width=16, height=12)
        rays = pixel_rays(CameraPose.identity(), intr, 6, 8)
        expected = np.array([(0.5 - 4.0) / 10.0, (0.5 - 3.0) / 8.0, 1.0])
        np.testing.assert_allclose(rays[0, 0], expected / np.linalg.norm(expected), atol=1e-12)

    def test_camera_model_wrapper(self) -> None:
        camera = CameraModel(CameraPose.identity(), CENTERED)
        np.testing.assert_array_equal(
            camera_plucker_map(camera, 5, 5).values,
            compute_plucker_map(camera.pose, CENTERED, 5, 5).values,
        )

    def test_invalid_size(self) -> None:
        with pytest.raises(ShapeError):
            compute_plucker_map(CameraPose.identity(), CENTERED, 0, 5)

    def test_map_shape_checked(self) -> None:
        with pytest.raises(ShapeError):
            PluckerMap(np.zeros((4, 4, 5)))
