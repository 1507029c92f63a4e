"""Pose, intrinsics and projection basics against hand-computed values."""

import numpy as np
import pytest

from semloc.errors import DegenerateGeometryError
from semloc.geometry import (
    CameraIntrinsics,
    Pose,
    project,
    project_points,
    quaternion_from_rotation,
    rotation_from_axis_angle,
    rotation_from_quaternion,
)

from conftest import random_pose


def test_identity_projection_hits_principal_point(intrinsics):
    pose = Pose.identity()
    px = project(pose, intrinsics, np.array([0.0, 0.0, 2.0]))
    assert np.allclose(px, [320.0, 240.0])


def test_projection_oracle_matrix_form(intrinsics):
    # oracle: homogeneous K [R|t] evaluation, done independently of project()
    rng = np.random.default_rng(7)
    for _ in range(50):
        pose = random_pose(rng)
        point = pose.inverse().transform(np.array([0.3, -0.2, 2.5]))
        k = intrinsics.matrix()
        h = k @ (pose.rotation @ point + pose.translation)
        expected = h[:2] / h[2]
        assert np.allclose(project(pose, intrinsics, point), expected, atol=1e-10)


def test_project_point_behind_camera_raises(intrinsics):
    pose = Pose.identity()
    with pytest.raises(DegenerateGeometryError):
        project(pose, intrinsics, np.array([0.0, 0.0, -1.0]))
    with pytest.raises(DegenerateGeometryError):
        project(pose, intrinsics, np.array([0.0, 0.0, 0.0]))


def test_project_points_flags_invalid(intrinsics):
    pts = np.array([[0.0, 0.0, 2.0], [0.0, 0.0, -2.0]])
    pixels, valid = project_points(Pose.identity(), intrinsics, pts)
    assert valid.tolist() == [True, False]
    assert np.allclose(pixels[0], [320.0, 240.0])
    assert np.isnan(pixels[1]).all()


def test_compose_inverse_roundtrip():
    rng = np.random.default_rng(3)
    for _ in range(20):
        a = random_pose(rng)
        b = random_pose(rng)
        ab = a.compose(b)
        x = rng.normal(size=3)
        assert np.allclose(ab.transform(x), a.transform(b.transform(x)), atol=1e-12)
        ident = a.compose(a.inverse())
        assert np.allclose(ident.rotation, np.eye(3), atol=1e-12)
        assert np.allclose(ident.translation, 0.0, atol=1e-12)


def test_camera_center():
    rot = rotation_from_axis_angle(np.array([0.0, 0.0, np.pi / 2]))
    center = np.array([1.0, 2.0, 3.0])
    pose = Pose(rot, -rot @ center)
    assert np.allclose(pose.camera_center(), center, atol=1e-12)
    assert np.allclose(pose.transform(center), 0.0, atol=1e-12)


def test_pose_rejects_non_orthonormal():
    with pytest.raises(DegenerateGeometryError):
        Pose(np.eye(3) * 1.01, np.zeros(3))
    # reflections are not rotations
    with pytest.raises(DegenerateGeometryError):
        Pose(np.diag([1.0, 1.0, -1.0]), np.zeros(3))


def test_quaternion_roundtrip_and_sign():
    rng = np.random.default_rng(11)
    for _ in range(100):
        axis = rng.normal(size=3)
        axis /= np.linalg.norm(axis)
        r = rotation_from_axis_angle(axis * rng.uniform(0, np.pi))
        q = quaternion_from_rotation(r)
        assert q[0] >= 0.0
        assert np.isclose(np.linalg.norm(q), 1.0, atol=1e-12)
        assert np.allclose(rotation_from_quaternion(q), r, atol=1e-9)


def test_quaternion_known_value():
    # 90 deg about z: q = (cos45, 0, 0, sin45)
    r = rotation_from_axis_angle(np.array([0.0, 0.0, np.pi / 2]))
    q = quaternion_from_rotation(r)
    s = np.sqrt(0.5)
    assert np.allclose(q, [s, 0.0, 0.0, s], atol=1e-12)


def test_intrinsics_validation():
    with pytest.raises(DegenerateGeometryError):
        CameraIntrinsics(fx=-1.0, fy=400.0, cx=320.0, cy=240.0, width=640, height=480)
    with pytest.raises(DegenerateGeometryError):
        CameraIntrinsics(fx=400.0, fy=400.0, cx=700.0, cy=240.0, width=640, height=480)


def test_normalize_denormalize_roundtrip(intrinsics):
    rng = np.random.default_rng(5)
    px = rng.uniform(0, 640, size=(30, 2))
    assert np.allclose(intrinsics.denormalize(intrinsics.normalize(px)), px, atol=1e-10)
