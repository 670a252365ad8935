"""Core value types: points, rotation matrices, and rigid transforms.

All types are immutable and hold 64-bit floats. Rotation matrices are stored
row-major and validated on construction; near-orthogonal data must be repaired
through :func:`mvcalib.numeric.nearest_rotation` before it can become a
:class:`Rotation3`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

#: Frobenius tolerance on R^T R = I and |det(R) - 1| accepted by Rotation3.
ORTHONORMALITY_TOL = 1e-9


def _check_finite(name: str, *values: float) -> None:
    for v in values:
        if not math.isfinite(v):
            raise ValueError(f"{name} component is not finite: {v!r}")


@dataclass(frozen=True)
class Point3:
    """A point in 3D world or camera coordinates (length units)."""

    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        _check_finite("Point3", self.x, self.y, self.z)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=np.float64)

    @classmethod
    def from_array(cls, a) -> "Point3":
        x, y, z = np.asarray(a, dtype=np.float64).reshape(3)
        return cls(float(x), float(y), float(z))


@dataclass(frozen=True)
class Point2:
    """A point on the image plane or pixel grid; u is the column axis, v the row axis."""

    u: float
    v: float

    def __post_init__(self) -> None:
        _check_finite("Point2", self.u, self.v)

    def as_array(self) -> np.ndarray:
        return np.array([self.u, self.v], dtype=np.float64)

    @classmethod
    def from_array(cls, a) -> "Point2":
        u, v = np.asarray(a, dtype=np.float64).reshape(2)
        return cls(float(u), float(v))


@dataclass(frozen=True, eq=False)
class Rotation3:
    """A proper rotation: 3x3 row-major matrix with R^T R = I and det(R) = +1."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.array(self.matrix, dtype=np.float64)
        if m.shape != (3, 3):
            raise ValueError(f"rotation matrix must be 3x3, got {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValueError("rotation matrix has non-finite entries")
        gram_defect = np.linalg.norm(m.T @ m - np.eye(3))
        if gram_defect > ORTHONORMALITY_TOL:
            raise ValueError(
                f"matrix is not orthonormal (||R^T R - I||_F = {gram_defect:.3e}); "
                "repair it with numeric.nearest_rotation first"
            )
        det = np.linalg.det(m)
        if abs(det - 1.0) > ORTHONORMALITY_TOL:
            raise ValueError(f"matrix is not a proper rotation (det = {det:.17g})")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls) -> "Rotation3":
        return cls(np.eye(3))


@dataclass(frozen=True, eq=False)
class RigidTransform:
    """Rotation followed by translation: p -> R p + T."""

    rotation: Rotation3
    translation: np.ndarray

    def __post_init__(self) -> None:
        t = np.array(self.translation, dtype=np.float64).reshape(3)
        if not np.all(np.isfinite(t)):
            raise ValueError("translation has non-finite entries")
        t.flags.writeable = False
        object.__setattr__(self, "translation", t)

    @classmethod
    def identity(cls) -> "RigidTransform":
        return cls(Rotation3.identity(), np.zeros(3))


def apply_rigid(t: RigidTransform, p: Point3) -> Point3:
    """Map a point through the transform: R p + T."""
    return Point3.from_array(t.rotation.matrix @ p.as_array() + t.translation)


def compose(a: RigidTransform, b: RigidTransform) -> RigidTransform:
    """Transform applying b first, then a: compose(a, b)(p) = a(b(p))."""
    r = a.rotation.matrix @ b.rotation.matrix
    t = a.rotation.matrix @ b.translation + a.translation
    return RigidTransform(Rotation3(r), t)


def inverse(t: RigidTransform) -> RigidTransform:
    """Transform undoing t: compose(t, inverse(t)) is the identity."""
    rt = t.rotation.matrix.T
    return RigidTransform(Rotation3(rt.copy()), -(rt @ t.translation))
