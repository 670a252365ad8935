"""Dense linear-algebra kernels the calibration pipeline rests on.

Three solvers: the minimizing direction of a homogeneous system ||A v|| with
||v|| = 1, ordinary (minimum-norm) least squares, and the nearest proper
rotation to a 3x3 matrix. Matrices are plain 2D float64 numpy arrays,
row-major.
"""

from __future__ import annotations

import numpy as np

from .errors import DegenerateMatrixError, RankDeficientError, ShapeMismatchError
from .geometry import Rotation3

#: Relative threshold deciding that the two smallest singular values tie.
RANK_GAP_TOL = 1e-10

#: Singular values below this count as zero in nearest_rotation.
MIN_SINGULAR_VALUE = 1e-12


def _as_matrix(a, name: str = "a") -> np.ndarray:
    m = np.asarray(a, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ShapeMismatchError(f"{name} must be a 2D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ShapeMismatchError(f"{name} has non-finite entries")
    return m


def solve_homogeneous(a) -> np.ndarray:
    """Unit vector v minimizing ||A v||_2.

    Computed as the right-singular vector of the smallest singular value of A.
    The sign is canonicalized so the last component that is nonzero (relative
    to the largest) is positive.

    Raises:
        ShapeMismatchError: if A has fewer than cols - 1 rows.
        RankDeficientError: if the two smallest singular values are within
            RANK_GAP_TOL relative of each other, i.e. the minimizing
            direction is not unique.
    """
    m = _as_matrix(a)
    rows, cols = m.shape
    if rows < cols - 1:
        raise ShapeMismatchError(
            f"need at least {cols - 1} rows for a {cols}-unknown homogeneous system, got {rows}"
        )
    _, s, vt = np.linalg.svd(m)
    # With rows == cols - 1 the trailing singular value is implicitly zero.
    if len(s) < cols:
        s = np.concatenate([s, np.zeros(cols - len(s))])
    if s[0] == 0.0:
        raise RankDeficientError("matrix is identically zero")
    if s[-2] <= RANK_GAP_TOL * s[0] or (s[-2] - s[-1]) <= RANK_GAP_TOL * s[-2]:
        raise RankDeficientError(
            f"two smallest singular values are not separated "
            f"({s[-2]:.6e} vs {s[-1]:.6e}); solution direction is not unique"
        )
    v = vt[-1]
    nz = np.nonzero(np.abs(v) > 1e-12 * np.max(np.abs(v)))[0]
    if v[nz[-1]] < 0.0:
        v = -v
    return v


def solve_least_squares(a, b) -> np.ndarray:
    """Z minimizing ||b - A Z||_F, minimum-norm if A is rank deficient.

    Raises:
        ShapeMismatchError: if row counts disagree or A has fewer rows than
            columns.
    """
    ma = _as_matrix(a, "a")
    mb = np.asarray(b, dtype=np.float64)
    if mb.ndim not in (1, 2):
        raise ShapeMismatchError(f"b must be a vector or matrix, got shape {mb.shape}")
    if not np.all(np.isfinite(mb)):
        raise ShapeMismatchError("b has non-finite entries")
    if ma.shape[0] != mb.shape[0]:
        raise ShapeMismatchError(
            f"row counts disagree: a has {ma.shape[0]}, b has {mb.shape[0]}"
        )
    if ma.shape[0] < ma.shape[1]:
        raise ShapeMismatchError(
            f"system is underdetermined: {ma.shape[0]} rows for {ma.shape[1]} unknowns"
        )
    z, _, _, _ = np.linalg.lstsq(ma, mb, rcond=None)
    return z


def nearest_rotation(m) -> Rotation3:
    """Closest proper rotation to a 3x3 matrix in the Frobenius norm.

    From the SVD m = U diag(s) V^T the result is U V^T; if that product has
    determinant -1, the column of U paired with the smallest singular value
    is negated first.

    Raises:
        ShapeMismatchError: if m is not 3x3.
        DegenerateMatrixError: if the smallest singular value is below
            MIN_SINGULAR_VALUE (no well-defined rotation).
    """
    mm = _as_matrix(m, "m")
    if mm.shape != (3, 3):
        raise ShapeMismatchError(f"expected a 3x3 matrix, got {mm.shape}")
    u, s, vt = np.linalg.svd(mm)
    if s[-1] < MIN_SINGULAR_VALUE:
        raise DegenerateMatrixError(
            f"smallest singular value {s[-1]:.6e} is below {MIN_SINGULAR_VALUE:g}"
        )
    r = u @ vt
    if np.linalg.det(r) < 0.0:
        u = u.copy()
        u[:, -1] = -u[:, -1]
        r = u @ vt
    return Rotation3(r)
