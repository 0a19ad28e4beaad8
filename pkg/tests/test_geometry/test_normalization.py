"""Tests for camera-set normalisation and reference selection."""

from typing import List

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.geometry.camera import CameraPose, look_at
from src.geometry.normalization import (
    SimilarityTransform,
    normalize_cameras,
    select_reference_view,
)
from tests.test_geometry.test_camera import random_rotation


def random_poses(rng: np.random.Generator, count: int) -> List[CameraPose]:
    return [CameraPose(random_rotation(rng), rng.normal(scale=2.0, size=3)) for _ in range(count)]


def relative(a: CameraPose, b: CameraPose) -> np.ndarray:
    return a.inverse_matrix() @ b.matrix()


class TestNormalizeCameras:

    def test_single_identity_unchanged(self) -> None:
        poses, transform = normalize_cameras([CameraPose.identity()])
        assert poses[0].allclose(CameraPose.identity())
        assert transform.is_identity()

    def test_two_cameras_five_apart(self) -> None:
        a = look_at([0.0, 0.0, -2.0])
        b = look_at([3.0, 4.0, -2.0])
        poses, transform = normalize_cameras([a, b], reference_index=0)
        assert poses[0].allclose(CameraPose.identity(), atol=1e-12)
        assert np.linalg.norm(poses[1].center) == pytest.approx(1.0)
        assert transform.scale == pytest.approx(0.2)

    def test_relative_transforms_preserved(self, rng: np.random.Generator) -> None:
        original = random_poses(rng, 3)
        normalized, transform = normalize_cameras(original, reference_index=1)
        for i in range(3):
            for j in range(3):
                before = relative(original[i], original[j])
                after = relative(normalized[i], normalized[j])
                np.testing.assert_allclose(after[:3, :3], before[:3, :3], atol=1e-6)
                np.testing.assert_allclose(after[:3, 3], transform.scale * before[:3, 3], atol=1e-6)

    def test_max_distance_is_one(self, rng: np.random.Generator) -> None:
        normalized, _ = normalize_cameras(random_poses(rng, 5), reference_index=2)
        distances = [np.linalg.norm(p.center) for p in normalized]
        assert max(distances) == pytest.approx(1.0)

    def test_coincident_centers_skip_scaling(self, rng: np.random.Generator) -> None:
        poses = [CameraPose(random_rotation(rng), np.ones(3)) for _ in range(3)]
        normalized, transform = normalize_cameras(poses)
        assert transform.scale == 1.0
        for pose in normalized:
            np.testing.assert_allclose(pose.center, 0.0, atol=1e-12)

    def test_transform_maps_targets_consistently(self, rng: np.random.Generator) -> None:
        inputs = random_poses(rng, 3)
        target = random_poses(rng, 1)[0]
        normalized, transform = normalize_cameras(inputs)
        mapped = transform.apply_to_pose(target)
        expected = relative(inputs[1], target)
        actual = relative(normalized[1], mapped)
        np.testing.assert_allclose(actual[:3, :3], expected[:3, :3], atol=1e-6)

    @settings(max_examples=20, deadline=None)
    @given(st.integers(min_value=0, max_value=10_000), st.integers(min_value=1, max_value=6))
    def test_idempotent(self, seed: int, count: int) -> None:
        rng = np.random.default_rng(seed)
        reference = int(rng.integers(count))
        once, _ = normalize_cameras(random_poses(rng, count), reference_index=reference)
        twice, transform = normalize_cameras(once, reference_index=reference)
        assert transform.is_identity(atol=1e-6)
        for a, b in zip(once, twice):
            assert a.allclose(b, atol=1e-6)

    @settings(max_examples=20, deadline=None)
    @given(st.integers(min_value=0, max_value=10_000), st.integers(min_value=1, max_value=6))
    def test_global_rigid_motion_has_no_effect(self, seed: int, count: int) -> None:
        rng = np.random.default_rng(seed)
        poses = random_poses(rng, count)
        motion = SimilarityTransform(rotation=random_rotation(rng), translation=rng.normal(size=3))
        reference = int(rng.integers(count))
        expected, _ = normalize_cameras(poses, reference_index=reference)
        moved, _ = normalize_cameras(
            [motion.apply_to_pose(p) for p in poses], reference_index=reference
        )
        for a, b in zip(expected, moved):
            assert a.allclose(b, atol=1e-5)

    def test_errors(self) -> None:
        with pytest.raises(ValueError):
            normalize_cameras([])
        with pytest.raises(IndexError):
            normalize_cameras([CameraPose.identity()], reference_index=3)

    def test_similarity_point(self) -> None:
        transform = SimilarityTransform(translation=np.array([1.0, 0.0, 0.0]), scale=2.0)
        np.testing.assert_allclose(transform.apply_to_point([0.0, 1.0, 0.0]), [2.0, 2.0, 0.0])


class TestSelectReferenceView:

    def test_nearest_to_centroid(self) -> None:
        poses = [look_at(c) for c in ([2.0, 0.0, 0.0], [0.1, 0.0, 1.0], [-2.0, 0.0, 0.0])]
        assert select_reference_view(poses) == 1

    @settings(max_examples=20, deadline=None)
    @given(st.integers(min_value=0, max_value=10_000), st.integers(min_value=1, max_value=5))
    def test_permutation_invariant(self, seed: int, count: int) -> None:
        rng = np.random.default_rng(seed)
        poses = random_poses(rng, count)
        order = rng.permutation(count)
        chosen = select_reference_view(poses)
        permuted = select_reference_view([poses[i] for i in order])
        assert order[permuted] == chosen

    @settings(max_examples=20, deadline=None)
    @given(st.integers(min_value=0, max_value=10_000))
    def test_rigid_invariant_for_two_views(self, seed: int) -> None:
        rng = np.random.default_rng(seed)
        poses = random_poses(rng, 2)
        motion = SimilarityTransform(rotation=random_rotation(rng), translation=rng.normal(size=3))
        moved = [motion.apply_to_pose(p) for p in poses]
        assert select_reference_view(moved) == select_reference_view(poses)
