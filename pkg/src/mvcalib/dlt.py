"""Direct Linear Transformation calibration.

Stacks two homogeneous equations per 3D-2D correspondence into a 2Nx12
design matrix, solves it by SVD, rescales the solution to the unit-third-row
normalization (singularity free, unlike fixing m34 = 1), resolves the global
sign by requiring positive depth of the world origin, and recovers the
physical parameters through closed-form dot products.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    BadGeometryError,
    DegenerateConfigurationError,
    DegenerateFocalError,
    NotNormalizedError,
    RankDeficientError,
    TooFewPointsError,
)
from .geometry import Point2, Point3, RigidTransform
from .numeric import nearest_rotation, solve_homogeneous
from .projection import (
    Camera,
    CameraIntrinsics,
    ProjectionMatrix,
    ReprojectionReport,
    reprojection_errors,
)

#: Fewest correspondences accepted: 2N = 12 rows cover the 11 effective unknowns.
MIN_CORRESPONDENCES = 6

#: Third-row norm must match 1 within this before parameter extraction.
NORMALIZATION_TOL = 1e-9

_SQRT_EPS = 1e-12


@dataclass(frozen=True)
class Correspondence:
    """A world point paired with its observed pixel coordinates."""

    world: Point3
    pixel: Point2


@dataclass(frozen=True)
class CalibrationResult:
    """Everything calibrate() recovers for one camera.

    matrix is the normalized projection matrix, camera the extracted
    parameters, raw_rotation the row-stacked rotation estimate before
    orthogonalization, and errors the reprojection report of matrix against
    its own input.
    """

    matrix: ProjectionMatrix
    camera: Camera
    raw_rotation: np.ndarray
    errors: ReprojectionReport


def build_design_matrix(corrs: Sequence[Correspondence]) -> np.ndarray:
    """Stack the 2Nx12 homogeneous system L a = 0.

    Row pair for world (xw, yw, zw) observed at (x, y), with the unknowns
    ordered a = (m11..m14, m21..m24, m31..m34):

        (xw, yw, zw, 1,  0,  0,  0, 0, -x*xw, -x*yw, -x*zw, -x)
        ( 0,  0,  0, 0, xw, yw, zw, 1, -y*xw, -y*yw, -y*zw, -y)

    Raises:
        TooFewPointsError: with fewer than MIN_CORRESPONDENCES pairs.
    """
    n = len(corrs)
    if n < MIN_CORRESPONDENCES:
        raise TooFewPointsError(
            f"need at least {MIN_CORRESPONDENCES} correspondences, got {n}"
        )
    L = np.zeros((2 * n, 12))
    for i, c in enumerate(corrs):
        w = np.array([c.world.x, c.world.y, c.world.z, 1.0])
        L[2 * i, 0:4] = w
        L[2 * i, 8:12] = -c.pixel.u * w
        L[2 * i + 1, 4:8] = w
        L[2 * i + 1, 8:12] = -c.pixel.v * w
    return L


def extract_parameters(m: ProjectionMatrix) -> tuple[Camera, np.ndarray]:
    """Recover intrinsics and extrinsics from a normalized projection matrix.

    With rows m1, m2, m3 (first three columns) and the unit-norm convention
    on m3:

        u0 = m1 . m3          alpha_u = sqrt(m1 . m1 - u0^2)
        v0 = m2 . m3          alpha_v = sqrt(m2 . m2 - v0^2)
        r1 = (m1 - u0 m3) / alpha_u       Tx = (m14 - u0 m34) / alpha_u
        r2 = (m2 - v0 m3) / alpha_v       Ty = (m24 - v0 m34) / alpha_v
        r3 = m3                           Tz = m34

    The row-stacked (r1, r2, r3) may drift off the rotation manifold, so the
    returned camera carries its nearest proper rotation; the raw matrix is
    returned alongside for diagnostics.

    Raises:
        NotNormalizedError: if ||m3|| differs from 1 beyond NORMALIZATION_TOL.
        DegenerateFocalError: if either squared focal scale is not positive.
    """
    mat = m.matrix
    if abs(m.third_row_norm() - 1.0) > NORMALIZATION_TOL:
        raise NotNormalizedError(
            f"third-row norm is {m.third_row_norm():.12g}, expected 1"
        )
    m1, m2, m3 = mat[0, :3], mat[1, :3], mat[2, :3]
    u0 = float(m1 @ m3)
    v0 = float(m2 @ m3)
    au_sq = float(m1 @ m1) - u0 * u0
    av_sq = float(m2 @ m2) - v0 * v0
    if au_sq <= _SQRT_EPS or av_sq <= _SQRT_EPS:
        raise DegenerateFocalError(
            f"focal scale arguments must be positive, got {au_sq:.6e}, {av_sq:.6e}"
        )
    alpha_u = np.sqrt(au_sq)
    alpha_v = np.sqrt(av_sq)
    raw_rotation = np.vstack(
        [(m1 - u0 * m3) / alpha_u, (m2 - v0 * m3) / alpha_v, m3]
    )
    t = np.array(
        [
            (mat[0, 3] - u0 * mat[2, 3]) / alpha_u,
            (mat[1, 3] - v0 * mat[2, 3]) / alpha_v,
            mat[2, 3],
        ]
    )
    camera = Camera(
        intrinsics=CameraIntrinsics(float(alpha_u), float(alpha_v), u0, v0),
        extrinsics=RigidTransform(nearest_rotation(raw_rotation), t),
    )
    return camera, raw_rotation


def calibrate(corrs: Sequence[Correspondence]) -> CalibrationResult:
    """Run the full DLT: design matrix, SVD solve, normalization, extraction.

    The SVD solution is defined up to scale and sign. The scale is fixed by
    ||(m31, m32, m33)|| = 1 and the sign by requiring Tz = m34 > 0, i.e. the
    world origin sits in front of the camera.

    Raises:
        TooFewPointsError: with fewer than MIN_CORRESPONDENCES pairs.
        DegenerateConfigurationError: coplanar or otherwise rank-deficient
            world points.
        BadGeometryError: if Tz is non-positive under both signs.
    """
    L = build_design_matrix(corrs)
    try:
        v = solve_homogeneous(L)
    except RankDeficientError as e:
        raise DegenerateConfigurationError(
            f"calibration target is degenerate: {e}"
        ) from e
    m = v.reshape(3, 4)
    scale = np.linalg.norm(m[2, :3])
    if scale <= _SQRT_EPS:
        raise DegenerateConfigurationError(
            "third row of the solved matrix vanishes; target geometry is degenerate"
        )
    m = m / scale
    if m[2, 3] < 0.0:
        m = -m
    if m[2, 3] <= _SQRT_EPS:
        raise BadGeometryError(
            "world origin has zero depth in the camera; no sign puts it in front"
        )
    matrix = ProjectionMatrix(m)
    camera, raw_rotation = extract_parameters(matrix)
    report = reprojection_errors(
        matrix, [c.world for c in corrs], [c.pixel for c in corrs]
    )
    return CalibrationResult(
        matrix=matrix, camera=camera, raw_rotation=raw_rotation, errors=report
    )
