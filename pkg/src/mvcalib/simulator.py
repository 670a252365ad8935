"""Synthetic scenes with known ground truth.

Generates calibration patterns (two orthogonal planes of dots plus off-plane
dots), camera rigs whose every camera sees every dot, exact or noisy pixel
observations together with the matched local/global frame measurements, and
rendered dot images for the detection pipeline.

Everything is a deterministic function of (spec, seed). Randomness comes
from the PCG64 bit generator; Gaussian variates use the Box-Muller transform
over its uniforms, so runs reproduce bit-for-bit wherever the bit stream
does. Scene metadata should pin RNG_ALGORITHM and NORMAL_TRANSFORM.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dlt import Correspondence
from .errors import (
    BehindCameraError,
    DegenerateMatrixError,
    InvalidSpecError,
    OutOfFrameError,
    UnsatisfiableError,
)
from .features import GrayImage
from .geometry import (
    Point2,
    Point3,
    RigidTransform,
    Rotation3,
    apply_rigid,
    compose,
    inverse,
)
from .numeric import nearest_rotation
from .projection import Camera, CameraIntrinsics, project
from .registration import FramePair

RNG_ALGORITHM = "pcg64"
NORMAL_TRANSFORM = "box-muller"

#: Pattern grid pitch and in-plane jitter amplitude, in scene length units.
_GRID_PITCH = 0.06
_JITTER = 0.004

#: Smallest singular value of the centered calibration subset that still
#: counts as non-coplanar.
_COPLANARITY_TOL = 1e-6

#: Depth the local origin must keep in front of its camera for the
#: positive-Tz sign convention to be trustworthy.
_MIN_ORIGIN_DEPTH = 0.05

_MAX_POSE_ATTEMPTS = 1000


@dataclass(frozen=True)
class PatternSpec:
    """Calibration pattern layout request.

    positions overrides the generated layout when given (its length must
    equal dot_count). calibration_indices defaults to 8 dots spread over the
    whole pattern, registration_indices to the first 18 dots (all when there
    are fewer); the subsets overlap.
    """

    dot_count: int = 19
    positions: tuple[Point3, ...] | None = None
    calibration_indices: tuple[int, ...] | None = None
    registration_indices: tuple[int, ...] | None = None


@dataclass(frozen=True)
class Pattern:
    """Dot positions in the global frame plus the two working subsets."""

    dots: tuple[Point3, ...]
    calibration_indices: tuple[int, ...]
    registration_indices: tuple[int, ...]

    @property
    def calibration_dots(self) -> tuple[Point3, ...]:
        return tuple(self.dots[i] for i in self.calibration_indices)

    @property
    def registration_dots(self) -> tuple[Point3, ...]:
        return tuple(self.dots[i] for i in self.registration_indices)


@dataclass(frozen=True)
class RigSpec:
    """Camera arrangement request.

    Cameras are placed at a random direction and distance from look_at
    (pattern centroid when None), boresight on the target plus a bounded
    orientation jitter. Each camera also receives its own local world frame:
    a random rigid transform of the global frame, or the identity when
    identity_frames is set.

    With shared_pose every camera reuses one sampled pose (and should share
    intrinsics) while the local frames still differ; that is the setup whose
    registered projections can reach pixel-level consensus. min_dot_separation_px,
    when positive, additionally requires every pair of projected dots to stay
    that far apart (useful for rendering scenes whose dots must not merge).
    """

    camera_count: int = 4
    look_at: Point3 | None = None
    distance_range: tuple[float, float] = (0.5, 0.9)
    orientation_jitter: float = 0.06
    identity_frames: bool = False
    shared_pose: bool = False
    frame_translation: float = 0.35
    intrinsics: CameraIntrinsics | tuple[CameraIntrinsics, ...] = CameraIntrinsics(
        800.0, 820.0, 500.0, 550.0
    )
    width: int = 1000
    height: int = 1100
    margin: float = 40.0
    min_dot_separation_px: float = 0.0


@dataclass(frozen=True)
class NoiseSpec:
    """Pixel noise level and the seed of its deterministic realization."""

    sigma: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if not math.isfinite(self.sigma) or self.sigma < 0.0:
            raise ValueError(f"sigma must be finite and >= 0, got {self.sigma}")


@dataclass(frozen=True)
class SimulatedCamera:
    """Ground truth for one rig camera.

    camera holds global-frame extrinsics; frame maps the camera's private
    local world frame to the global frame.
    """

    camera: Camera
    frame: RigidTransform

    def local_camera(self) -> Camera:
        """The same physical camera expressed in its local world frame."""
        return Camera(
            intrinsics=self.camera.intrinsics,
            extrinsics=compose(self.camera.extrinsics, self.frame),
        )


@dataclass(frozen=True)
class Observation:
    """Measurements one camera contributes.

    correspondences pairs every dot's local-frame coordinates with its
    (possibly noisy) pixel observation; calibration is the calibration
    subset of it; frame_pair carries the registration subset's coordinates
    in both frames.
    """

    correspondences: tuple[Correspondence, ...]
    calibration: tuple[Correspondence, ...]
    frame_pair: FramePair


def _standard_normals(rng: np.random.Generator, n: int) -> np.ndarray:
    """Box-Muller transform over PCG64 uniforms."""
    m = (n + 1) // 2
    u1 = 1.0 - rng.random(m)  # (0, 1]: keeps the log finite
    u2 = rng.random(m)
    r = np.sqrt(-2.0 * np.log(u1))
    return np.concatenate([r * np.cos(2.0 * np.pi * u2), r * np.sin(2.0 * np.pi * u2)])[:n]


def _unit_vector(rng: np.random.Generator) -> np.ndarray:
    while True:
        v = _standard_normals(rng, 3)
        norm = np.linalg.norm(v)
        if norm > 1e-6:
            return v / norm


def _rotation_about(axis: np.ndarray, angle: float) -> np.ndarray:
    """Rodrigues formula for a rotation of `angle` about a unit axis."""
    kx, ky, kz = axis
    k = np.array([[0.0, -kz, ky], [kz, 0.0, -kx], [-ky, kx, 0.0]])
    return np.eye(3) + math.sin(angle) * k + (1.0 - math.cos(angle)) * (k @ k)


def _random_rotation(rng: np.random.Generator) -> Rotation3:
    while True:
        try:
            return nearest_rotation(_standard_normals(rng, 9).reshape(3, 3))
        except DegenerateMatrixError:  # measure-zero draw, try again
            continue


def _frac(x: float) -> float:
    return x - math.floor(x)


def _default_layout(n: int, rng: np.random.Generator) -> list[Point3]:
    """Two orthogonal planes of grid dots plus a few off-plane dots."""
    n_off = max(2, round(n / 6))
    remaining = n - n_off
    n_a = (remaining + 1) // 2
    n_b = remaining - n_a
    dots: list[Point3] = []
    side = max(1, math.ceil(math.sqrt(max(n_a, n_b))))
    for count, plane in ((n_a, "z0"), (n_b, "x0")):
        made = 0
        for j in range(side + 2):
            for i in range(side + 2):
                if made >= count:
                    break
                a = _GRID_PITCH * (1 + i) + _JITTER * (2.0 * rng.random() - 1.0)
                b = _GRID_PITCH * (1 + j) + _JITTER * (2.0 * rng.random() - 1.0)
                if plane == "z0":
                    dots.append(Point3(a, b, 0.0))
                else:
                    dots.append(Point3(0.0, a, b))
                made += 1
    for k in range(n_off):
        x = 0.05 + 0.16 * _frac(0.37 * (k + 1)) + _JITTER * (2.0 * rng.random() - 1.0)
        y = 0.05 + 0.16 * _frac(0.59 * (k + 1)) + _JITTER * (2.0 * rng.random() - 1.0)
        z = 0.04 + 0.14 * _frac(0.83 * (k + 1)) + _JITTER * (2.0 * rng.random() - 1.0)
        dots.append(Point3(x, y, z))
    return dots


def _check_subset(name: str, indices: Sequence[int], n: int, minimum: int) -> tuple[int, ...]:
    idx = tuple(int(i) for i in indices)
    if len(idx) < minimum:
        raise InvalidSpecError(f"{name} subset needs at least {minimum} dots, got {len(idx)}")
    if len(set(idx)) != len(idx):
        raise InvalidSpecError(f"{name} subset has duplicate indices")
    if any(i < 0 or i >= n for i in idx):
        raise InvalidSpecError(f"{name} subset index out of range 0..{n - 1}")
    return idx


def smallest_spread_singular_value(points: Sequence[Point3]) -> float:
    """Smallest singular value of the centered coordinate matrix.

    Zero for coplanar points; used as the non-coplanarity test.
    """
    coords = np.array([[p.x, p.y, p.z] for p in points])
    centered = coords - coords.mean(axis=0)
    return float(np.linalg.svd(centered, compute_uv=False)[-1])


def generate_pattern(spec: PatternSpec, seed: int) -> Pattern:
    """Build a calibration pattern; deterministic for a fixed seed.

    Raises:
        InvalidSpecError: bad counts, bad subset indices, or a coplanar
            calibration subset.
    """
    if spec.dot_count < 6:
        raise InvalidSpecError(f"need at least 6 dots, got {spec.dot_count}")
    rng = np.random.Generator(np.random.PCG64(seed))
    if spec.positions is not None:
        if len(spec.positions) != spec.dot_count:
            raise InvalidSpecError(
                f"{len(spec.positions)} positions given for dot_count {spec.dot_count}"
            )
        dots = tuple(spec.positions)
    else:
        dots = tuple(_default_layout(spec.dot_count, rng))
    n = len(dots)
    if spec.calibration_indices is not None:
        calib = _check_subset("calibration", spec.calibration_indices, n, 6)
    elif n <= 8:
        calib = tuple(range(n))
    else:
        calib = tuple(
            int(i) for i in np.round(np.linspace(0, n - 1, 8)).astype(int)
        )
    if spec.registration_indices is not None:
        reg = _check_subset("registration", spec.registration_indices, n, 4)
    else:
        reg = tuple(range(min(n, 18)))
    pattern = Pattern(dots=dots, calibration_indices=calib, registration_indices=reg)
    if smallest_spread_singular_value(pattern.calibration_dots) <= _COPLANARITY_TOL:
        raise InvalidSpecError("calibration subset is coplanar")
    return pattern


def _look_at_rotation(position: np.ndarray, target: np.ndarray) -> np.ndarray:
    forward = target - position
    forward = forward / np.linalg.norm(forward)
    up_hint = np.array([0.0, 0.0, 1.0])
    if abs(forward @ up_hint) > 0.98:
        up_hint = np.array([0.0, 1.0, 0.0])
    x_axis = np.cross(up_hint, forward)
    x_axis = x_axis / np.linalg.norm(x_axis)
    y_axis = np.cross(forward, x_axis)
    return np.vstack([x_axis, y_axis, forward])


def _camera_intrinsics(spec: RigSpec, index: int) -> CameraIntrinsics:
    if isinstance(spec.intrinsics, CameraIntrinsics):
        return spec.intrinsics
    return spec.intrinsics[index]


def _pose_sees_pattern(spec: RigSpec, camera: Camera, dots: Sequence[Point3]) -> bool:
    r = camera.extrinsics.rotation.matrix
    t = camera.extrinsics.translation
    pixels = []
    for dot in dots:
        pc = r @ dot.as_array() + t
        if pc[2] <= 1e-6:
            return False
        k = camera.intrinsics
        u = k.alpha_u * pc[0] / pc[2] + k.u0
        v = k.alpha_v * pc[1] / pc[2] + k.v0
        if not (spec.margin <= u <= spec.width - 1 - spec.margin):
            return False
        if not (spec.margin <= v <= spec.height - 1 - spec.margin):
            return False
        pixels.append((u, v))
    if spec.min_dot_separation_px > 0.0:
        for i in range(len(pixels)):
            for j in range(i + 1, len(pixels)):
                if math.dist(pixels[i], pixels[j]) < spec.min_dot_separation_px:
                    return False
    return True


def _frame_keeps_origin_in_front(camera: Camera, frame: RigidTransform) -> bool:
    # The local origin must sit in front of the camera, or the calibrated
    # positive-Tz sign convention cannot reproduce this pose.
    r = camera.extrinsics.rotation.matrix
    t = camera.extrinsics.translation
    return (r @ frame.translation + t)[2] > _MIN_ORIGIN_DEPTH


def generate_rig(spec: RigSpec, pattern: Pattern, seed: int) -> tuple[SimulatedCamera, ...]:
    """Place cameras around the pattern; deterministic for a fixed seed.

    Raises:
        InvalidSpecError: non-positive camera count or an empty distance range.
        UnsatisfiableError: no pose satisfying the visibility constraints
            was found for some camera within the attempt budget.
    """
    if spec.camera_count < 1:
        raise InvalidSpecError(f"camera_count must be >= 1, got {spec.camera_count}")
    lo, hi = spec.distance_range
    if not (0.0 < lo <= hi):
        raise InvalidSpecError(f"bad distance range {spec.distance_range}")
    if not isinstance(spec.intrinsics, CameraIntrinsics) and len(spec.intrinsics) != spec.camera_count:
        raise InvalidSpecError("per-camera intrinsics list length must match camera_count")
    rng = np.random.Generator(np.random.PCG64(seed))
    if spec.look_at is None:
        coords = np.array([[p.x, p.y, p.z] for p in pattern.dots])
        target = coords.mean(axis=0)
    else:
        target = spec.look_at.as_array()

    def sample_pose(intrinsics: CameraIntrinsics) -> Camera:
        for _ in range(_MAX_POSE_ATTEMPTS):
            direction = _unit_vector(rng)
            distance = lo + (hi - lo) * rng.random()
            position = target + distance * direction
            r = _look_at_rotation(position, target)
            if spec.orientation_jitter > 0.0:
                angle = spec.orientation_jitter * (2.0 * rng.random() - 1.0)
                r = _rotation_about(_unit_vector(rng), angle) @ r
            camera = Camera(
                intrinsics=intrinsics,
                extrinsics=RigidTransform(Rotation3(r), -(r @ position)),
            )
            if _pose_sees_pattern(spec, camera, pattern.dots):
                return camera
        raise UnsatisfiableError(
            f"no pose seeing all dots found in {_MAX_POSE_ATTEMPTS} attempts"
        )

    def sample_frame(camera: Camera) -> RigidTransform:
        if spec.identity_frames:
            frame = RigidTransform.identity()
            if not _frame_keeps_origin_in_front(camera, frame):
                raise UnsatisfiableError(
                    "identity frame puts the world origin behind a camera"
                )
            return frame
        for _ in range(_MAX_POSE_ATTEMPTS):
            shift = spec.frame_translation * (2.0 * rng.random(3) - 1.0)
            frame = RigidTransform(_random_rotation(rng), shift)
            if _frame_keeps_origin_in_front(camera, frame):
                return frame
        raise UnsatisfiableError(
            f"no local frame kept its origin in front of the camera "
            f"in {_MAX_POSE_ATTEMPTS} attempts"
        )

    cameras: list[SimulatedCamera] = []
    shared: Camera | None = None
    for index in range(spec.camera_count):
        if spec.shared_pose:
            if shared is None:
                shared = sample_pose(_camera_intrinsics(spec, 0))
            camera = Camera(
                intrinsics=_camera_intrinsics(spec, index),
                extrinsics=shared.extrinsics,
            )
        else:
            camera = sample_pose(_camera_intrinsics(spec, index))
        cameras.append(SimulatedCamera(camera=camera, frame=sample_frame(camera)))
    return tuple(cameras)


def observe(sim: SimulatedCamera, pattern: Pattern, noise: NoiseSpec) -> Observation:
    """Measure the pattern through one camera.

    Pixel observations are exact projections plus Gaussian noise of the
    requested sigma (deterministic under the noise seed; reuse a spec across
    cameras only if identical noise realizations are intended). World
    coordinates in the correspondences are local-frame; the frame pair
    carries the registration subset in both frames.

    Raises:
        BehindCameraError: if some dot is not in front of the camera.
    """
    local_cam = sim.local_camera()
    frame_inv = inverse(sim.frame)
    local_dots = tuple(apply_rigid(frame_inv, d) for d in pattern.dots)
    exact = [project(local_cam, d) for d in local_dots]
    if noise.sigma > 0.0:
        rng = np.random.Generator(np.random.PCG64(noise.seed))
        deltas = noise.sigma * _standard_normals(rng, 2 * len(exact))
        pixels = [
            Point2(p.u + deltas[2 * i], p.v + deltas[2 * i + 1])
            for i, p in enumerate(exact)
        ]
    else:
        pixels = exact
    corrs = tuple(
        Correspondence(world=d, pixel=px) for d, px in zip(local_dots, pixels)
    )
    return Observation(
        correspondences=corrs,
        calibration=tuple(corrs[i] for i in pattern.calibration_indices),
        frame_pair=FramePair(
            local=tuple(local_dots[i] for i in pattern.registration_indices),
            global_=tuple(pattern.dots[i] for i in pattern.registration_indices),
        ),
    )


def render_dot_image(
    camera: Camera,
    pattern: Pattern,
    width: int,
    height: int,
    dot_radius_px: int,
) -> GrayImage:
    """Render the pattern as dark discs (intensity 20) on a light field (230).

    Discs are hard (no anti-aliasing) and centered on the projected dot
    positions rounded to the pixel grid, so detected centroids sit within
    half a pixel of the exact projections per axis.

    Raises:
        OutOfFrameError: if a projected center is closer than dot_radius_px
            to the image border.
        BehindCameraError: if a dot is not in front of the camera.
    """
    if width < 1 or height < 1 or dot_radius_px < 1:
        raise ValueError("width, height and dot_radius_px must be positive")
    img = np.full((height, width), 230, dtype=np.uint8)
    radius = int(dot_radius_px)
    for dot in pattern.dots:
        px = project(camera, dot)
        if not (radius <= px.u <= width - 1 - radius) or not (
            radius <= px.v <= height - 1 - radius
        ):
            raise OutOfFrameError(
                f"dot projects to ({px.u:.1f}, {px.v:.1f}), within {radius} px of the border"
            )
        cu = math.floor(px.u + 0.5) if px.u >= 0 else math.ceil(px.u - 0.5)
        cv = math.floor(px.v + 0.5) if px.v >= 0 else math.ceil(px.v - 0.5)
        rows = np.arange(cv - radius, cv + radius + 1)
        cols = np.arange(cu - radius, cu + radius + 1)
        dv, du = np.meshgrid(rows - cv, cols - cu, indexing="ij")
        disc = dv * dv + du * du <= radius * radius
        img[rows[0] : rows[-1] + 1, cols[0] : cols[-1] + 1][disc] = 20
    return GrayImage(img)
