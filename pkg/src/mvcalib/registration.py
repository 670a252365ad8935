"""Rigid registration of per-camera local frames into one global frame.

From paired measurements of the same points in a local frame X and the
global frame Y (Y = R X + T), differencing against the first pair cancels T
and leaves an overdetermined linear system for R, solved in least squares
and projected back onto the rotation manifold. T then follows from the first
pair. Registered cameras all express their extrinsics relative to the global
frame, which is what makes a fixed world point land on one unified image
coordinate in every camera.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import BehindCameraError, DegenerateGeometryError, NoConsensusError
from .geometry import Point2, Point3, RigidTransform, compose, inverse
from .numeric import solve_least_squares
from .numeric import nearest_rotation
from .projection import Camera, project

#: Relative singular-value threshold for "difference rows do not span 3D".
_RANK_TOL = 1e-10


@dataclass(frozen=True)
class FramePair:
    """Matched point measurements: local holds X, global_ holds Y = R X + T."""

    local: tuple[Point3, ...]
    global_: tuple[Point3, ...]

    def __post_init__(self) -> None:
        local = tuple(self.local)
        global_ = tuple(self.global_)
        if len(local) != len(global_):
            raise ValueError(
                f"local and global lists differ in length: {len(local)} vs {len(global_)}"
            )
        if len(local) < 4:
            raise ValueError(f"need at least 4 point pairs, got {len(local)}")
        object.__setattr__(self, "local", local)
        object.__setattr__(self, "global_", global_)

    def __len__(self) -> int:
        return len(self.local)


@dataclass(frozen=True)
class RegisteredCamera:
    """A camera with global-frame extrinsics and the local-to-global transform used."""

    camera: Camera
    frame_transform: RigidTransform


@dataclass(frozen=True)
class UnificationResult:
    """Per-camera projections of one world point, with the first as consensus.

    max_deviation is the largest pairwise Euclidean distance between the
    unrounded projections; per_camera carries integer-rounded values when
    the rounding flag was set.
    """

    per_camera: tuple[Point2, ...]
    consensus: Point2
    max_deviation: float
    rounded: bool


def build_difference_system(fp: FramePair) -> tuple[np.ndarray, np.ndarray]:
    """First-point differences: A rows are x_i - x_1, b rows are y_i - y_1.

    Both are (n-1)x3; the translation cancels, and the Z solving A Z = b is
    the transpose of the rotation.
    """
    x = np.array([[p.x, p.y, p.z] for p in fp.local])
    y = np.array([[p.x, p.y, p.z] for p in fp.global_])
    return x[1:] - x[0], y[1:] - y[0]


def estimate_registration(fp: FramePair) -> RigidTransform:
    """Recover the local-to-global rigid transform from paired measurements.

    Least squares gives Z with Z^T the rotation estimate; the estimate is
    projected onto the nearest proper rotation before the translation is
    taken as T = y_1 - R x_1.

    Raises:
        DegenerateGeometryError: if the difference rows do not span 3D
            (collinear or coincident points).
    """
    a, b = build_difference_system(fp)
    s = np.linalg.svd(a, compute_uv=False)
    if s[0] == 0.0 or s[2] <= _RANK_TOL * s[0]:
        raise DegenerateGeometryError(
            "local points are collinear or coincident; rotation is not observable"
        )
    z = solve_least_squares(a, b)
    rotation = nearest_rotation(z.T)
    x1 = fp.local[0].as_array()
    y1 = fp.global_[0].as_array()
    return RigidTransform(rotation, y1 - rotation.matrix @ x1)


def register_camera(cam: Camera, frame: RigidTransform) -> RegisteredCamera:
    """Re-express a camera calibrated in a local frame relative to the global frame.

    frame maps the camera's local world frame to the global frame, so the
    registered extrinsics are the old ones composed with its inverse:
    projecting a global point through the result equals projecting its
    local-frame counterpart through the original camera. Intrinsics are
    untouched.
    """
    new_extrinsics = compose(cam.extrinsics, inverse(frame))
    return RegisteredCamera(
        camera=Camera(intrinsics=cam.intrinsics, extrinsics=new_extrinsics),
        frame_transform=frame,
    )


def _round_half_away(x: float) -> int:
    return math.floor(x + 0.5) if x >= 0.0 else math.ceil(x - 0.5)


def unify_point(
    cams: Sequence[RegisteredCamera],
    p_global: Point3,
    round_to_int: bool = False,
) -> UnificationResult:
    """Project one global point through every registered camera.

    With consistent registration all projections coincide; the first
    camera's value is reported as the consensus. When round_to_int is set,
    coordinates are rounded half away from zero and any disagreement raises.

    Raises:
        BehindCameraError: naming every camera the point is not in front of.
        NoConsensusError: if rounding is requested and the rounded values
            disagree.
    """
    if len(cams) == 0:
        raise ValueError("need at least one registered camera")
    projections: list[Point2] = []
    behind: list[int] = []
    for i, rc in enumerate(cams):
        try:
            projections.append(project(rc.camera, p_global))
        except BehindCameraError:
            behind.append(i)
    if behind:
        raise BehindCameraError(
            f"point is behind camera(s) {', '.join(str(i) for i in behind)}"
        )
    max_dev = 0.0
    for i in range(len(projections)):
        for j in range(i + 1, len(projections)):
            d = math.hypot(
                projections[i].u - projections[j].u,
                projections[i].v - projections[j].v,
            )
            max_dev = max(max_dev, d)
    if round_to_int:
        rounded = tuple(
            Point2(float(_round_half_away(p.u)), float(_round_half_away(p.v)))
            for p in projections
        )
        if any(r != rounded[0] for r in rounded[1:]):
            values = ", ".join(f"({r.u:.0f}, {r.v:.0f})" for r in rounded)
            raise NoConsensusError(f"rounded coordinates disagree: {values}")
        return UnificationResult(
            per_camera=rounded,
            consensus=rounded[0],
            max_deviation=max_dev,
            rounded=True,
        )
    return UnificationResult(
        per_camera=tuple(projections),
        consensus=projections[0],
        max_deviation=max_dev,
        rounded=False,
    )
