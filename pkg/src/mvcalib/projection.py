"""Forward pinhole model: world -> camera -> image -> pixel.

A camera is intrinsics (focal scales alpha_u, alpha_v and principal point
u0, v0) plus a world-to-camera rigid transform. The same projection is
available in factored form (project) and as a single 3x4 matrix
(to_matrix / project_matrix); the two paths agree to floating-point noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import BehindCameraError, DegenerateDepthError, ShapeMismatchError
from .geometry import Point2, Point3, RigidTransform, apply_rigid

#: Depth (or homogeneous scale) magnitudes at or below this are degenerate.
DEPTH_EPS = 1e-12


@dataclass(frozen=True)
class CameraIntrinsics:
    """Focal scales in pixels (alpha_u = f/Sx, alpha_v = f/Sy) and principal point."""

    alpha_u: float
    alpha_v: float
    u0: float
    v0: float

    def __post_init__(self) -> None:
        vals = (self.alpha_u, self.alpha_v, self.u0, self.v0)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError(f"intrinsics must be finite, got {vals}")
        if self.alpha_u <= 0.0 or self.alpha_v <= 0.0:
            raise ValueError(f"focal scales must be positive, got {self.alpha_u}, {self.alpha_v}")


@dataclass(frozen=True)
class Camera:
    """Intrinsics plus world-to-camera extrinsics."""

    intrinsics: CameraIntrinsics
    extrinsics: RigidTransform


@dataclass(frozen=True, eq=False)
class ProjectionMatrix:
    """3x4 matrix mapping homogeneous world points to homogeneous pixels, defined up to scale."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.array(self.matrix, dtype=np.float64)
        if m.shape != (3, 4):
            raise ValueError(f"projection matrix must be 3x4, got {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValueError("projection matrix has non-finite entries")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    def third_row_norm(self) -> float:
        """Euclidean norm of (m31, m32, m33); 1.0 for a normalized matrix."""
        return float(np.linalg.norm(self.matrix[2, :3]))


@dataclass(frozen=True)
class SensorModel:
    """Image-plane to frame-buffer conversion parameters.

    dx, dy are the center-to-center distances between adjacent sensor cells;
    cx, cy the frame-buffer center in pixels. The scan-line uncertainty
    factor sx is pinned to 1.0 (hardware timing effects are out of scope);
    the field exists so the conversion formula keeps its conventional shape.
    """

    dx: float
    dy: float
    cx: float
    cy: float
    sx: float = 1.0

    def __post_init__(self) -> None:
        if self.dx <= 0.0 or self.dy <= 0.0:
            raise ValueError(f"sensor pitches must be positive, got dx={self.dx}, dy={self.dy}")
        if self.sx != 1.0:
            raise ValueError(f"uncertainty factor is pinned to 1.0, got {self.sx}")
        if not all(math.isfinite(v) for v in (self.dx, self.dy, self.cx, self.cy)):
            raise ValueError("sensor model fields must be finite")


@dataclass(frozen=True)
class FocalModel:
    """Documentation-only decomposition of the focal scales.

    A physical focal length f with sensor pitches Sx, Sy yields
    alpha_u = f/Sx and alpha_v = f/Sy; only those quotients are observable,
    so this type never feeds the pipeline.
    """

    f: float
    Sx: float
    Sy: float

    def __post_init__(self) -> None:
        if self.f <= 0.0 or self.Sx <= 0.0 or self.Sy <= 0.0:
            raise ValueError("focal length and pitches must be positive")

    @property
    def alpha_u(self) -> float:
        return self.f / self.Sx

    @property
    def alpha_v(self) -> float:
        return self.f / self.Sy


@dataclass(frozen=True)
class ReprojectionReport:
    """Per-axis mean reprojection errors plus a pooled RMS.

    mean_u and mean_v average observed minus projected along each axis; rms
    pools the squared per-axis residuals of all points.
    """

    mean_u: float
    mean_v: float
    rms: float
    projected: tuple[Point2, ...]
    residuals: tuple[Point2, ...]

    @property
    def count(self) -> int:
        return len(self.residuals)


def world_to_camera(cam: Camera, p: Point3) -> Point3:
    """Express a world point in the camera frame."""
    return apply_rigid(cam.extrinsics, p)


def camera_to_pixel(cam: Camera, pc: Point3) -> Point2:
    """Project a camera-frame point to pixels: (alpha_u X/Z + u0, alpha_v Y/Z + v0).

    Raises:
        BehindCameraError: if the depth Z is at or below DEPTH_EPS.
    """
    if pc.z <= DEPTH_EPS:
        raise BehindCameraError(f"point depth {pc.z:.6e} is not in front of the camera")
    k = cam.intrinsics
    return Point2(k.alpha_u * pc.x / pc.z + k.u0, k.alpha_v * pc.y / pc.z + k.v0)


def project(cam: Camera, p: Point3) -> Point2:
    """Full chain: world point to pixel coordinates."""
    return camera_to_pixel(cam, world_to_camera(cam, p))


def to_matrix(cam: Camera) -> ProjectionMatrix:
    """Fold intrinsics and extrinsics into one 3x4 projection matrix.

    The third row is (r3 | Tz), so the matrix satisfies the unit-third-row
    normalization by construction.
    """
    k = cam.intrinsics
    r = cam.extrinsics.rotation.matrix
    t = cam.extrinsics.translation
    m = np.empty((3, 4))
    m[0, :3] = k.alpha_u * r[0] + k.u0 * r[2]
    m[1, :3] = k.alpha_v * r[1] + k.v0 * r[2]
    m[2, :3] = r[2]
    m[0, 3] = k.alpha_u * t[0] + k.u0 * t[2]
    m[1, 3] = k.alpha_v * t[1] + k.v0 * t[2]
    m[2, 3] = t[2]
    return ProjectionMatrix(m)


def project_matrix(m: ProjectionMatrix, p: Point3) -> Point2:
    """Project through a 3x4 matrix with homogeneous division.

    Raises:
        DegenerateDepthError: if the homogeneous scale
            m31 x + m32 y + m33 z + m34 is within DEPTH_EPS of zero.
    """
    hp = np.array([p.x, p.y, p.z, 1.0])
    num = m.matrix @ hp
    alpha = num[2]
    if abs(alpha) <= DEPTH_EPS:
        raise DegenerateDepthError(f"homogeneous scale {alpha:.6e} is numerically zero")
    return Point2(num[0] / alpha, num[1] / alpha)


def image_to_framebuffer(s: SensorModel, p: Point2) -> Point2:
    """Convert image coordinates to frame-buffer pixels: (sx u/dx + cx, v/dy + cy)."""
    return Point2(s.sx * p.u / s.dx + s.cx, p.v / s.dy + s.cy)


def reprojection_errors(
    m: ProjectionMatrix,
    world: Sequence[Point3],
    observed: Sequence[Point2],
) -> ReprojectionReport:
    """Compare observations against projections of their world points.

    Residuals are observed minus projected. The report carries the per-axis
    means, the RMS pooled over both axes, and the per-point values.

    Raises:
        ShapeMismatchError: on empty or unequal-length inputs.
        DegenerateDepthError: propagated from the projection.
    """
    if len(world) != len(observed):
        raise ShapeMismatchError(
            f"{len(world)} world points but {len(observed)} observations"
        )
    if len(world) == 0:
        raise ShapeMismatchError("need at least one correspondence")
    projected = tuple(project_matrix(m, p) for p in world)
    residuals = tuple(
        Point2(o.u - q.u, o.v - q.v) for o, q in zip(observed, projected)
    )
    du = np.array([r.u for r in residuals])
    dv = np.array([r.v for r in residuals])
    rms = math.sqrt(float(np.mean(np.concatenate([du, dv]) ** 2)))
    return ReprojectionReport(
        mean_u=float(np.mean(du)),
        mean_v=float(np.mean(dv)),
        rms=rms,
        projected=projected,
        residuals=residuals,
    )
