"""Shared test utilities: independent constructions of rotations, cameras, and scenes.

Rotations here are built by Gram-Schmidt orthonormalization, not by the
library's SVD-based repair, so round-trip tests do not check a function
against itself.
"""

from __future__ import annotations

import numpy as np

from mvcalib.dlt import Correspondence
from mvcalib.geometry import Point3, RigidTransform, Rotation3
from mvcalib.projection import Camera, CameraIntrinsics, project


def random_rotation(rng: np.random.Generator) -> Rotation3:
    """Proper rotation from Gram-Schmidt on Gaussian vectors."""
    while True:
        a = rng.standard_normal(3)
        b = rng.standard_normal(3)
        na = np.linalg.norm(a)
        if na < 1e-6:
            continue
        e1 = a / na
        b = b - (b @ e1) * e1
        nb = np.linalg.norm(b)
        if nb < 1e-6:
            continue
        e2 = b / nb
        e3 = np.cross(e1, e2)
        return Rotation3(np.vstack([e1, e2, e3]))


def random_rigid(rng: np.random.Generator, t_scale: float = 1.0) -> RigidTransform:
    return RigidTransform(random_rotation(rng), t_scale * rng.uniform(-1.0, 1.0, 3))


def random_point(rng: np.random.Generator, scale: float = 1.0) -> Point3:
    return Point3(*(scale * rng.uniform(-1.0, 1.0, 3)))


def look_at_camera(rng: np.random.Generator) -> Camera:
    """Random camera at 0.6..1.0 from the origin, boresight through it.

    The origin then has positive depth, which is what the DLT sign
    convention assumes.
    """
    while True:
        direction = rng.standard_normal(3)
        n = np.linalg.norm(direction)
        if n > 1e-6:
            direction /= n
            break
    position = rng.uniform(0.6, 1.0) * direction
    forward = -direction
    up = np.array([0.0, 0.0, 1.0])
    if abs(forward @ up) > 0.98:
        up = np.array([0.0, 1.0, 0.0])
    x_axis = np.cross(up, forward)
    x_axis /= np.linalg.norm(x_axis)
    y_axis = np.cross(forward, x_axis)
    r = np.vstack([x_axis, y_axis, forward])
    intrinsics = CameraIntrinsics(
        alpha_u=rng.uniform(600.0, 1000.0),
        alpha_v=rng.uniform(600.0, 1000.0),
        u0=rng.uniform(300.0, 700.0),
        v0=rng.uniform(300.0, 700.0),
    )
    return Camera(
        intrinsics=intrinsics,
        extrinsics=RigidTransform(Rotation3(r), -(r @ position)),
    )


def box_points(rng: np.random.Generator, n: int, half_extent: float = 0.15) -> list[Point3]:
    """Uniform points in an origin-centered cube."""
    return [Point3(*rng.uniform(-half_extent, half_extent, 3)) for _ in range(n)]


def exact_correspondences(camera: Camera, points: list[Point3]) -> list[Correspondence]:
    return [Correspondence(world=p, pixel=project(camera, p)) for p in points]


def null_space_system(rng: np.random.Generator, rows: int, cols: int):
    """Matrix whose rows are random vectors made orthogonal to a unit v*."""
    v = rng.standard_normal(cols)
    v /= np.linalg.norm(v)
    a = rng.standard_normal((rows, cols))
    a -= np.outer(a @ v, v)
    return a, v


def polar_rotation_oracle(m: np.ndarray) -> np.ndarray:
    """Nearest proper rotation via symmetric eigendecomposition of m^T m.

    Independent of the SVD route: P = m (m^T m)^(-1/2); if det(P) < 0 the
    result is reflected across the eigenvector of the smallest eigenvalue.
    """
    w, q = np.linalg.eigh(m.T @ m)
    inv_sqrt = q @ np.diag(1.0 / np.sqrt(w)) @ q.T
    p = m @ inv_sqrt
    if np.linalg.det(p) < 0.0:
        v_min = q[:, 0]
        p = p @ (np.eye(3) - 2.0 * np.outer(v_min, v_min))
    return p
