"""Exception taxonomy for the calibration pipeline.

Every failure mode raised by the library derives from :class:`MvCalibError`,
so callers (including the CLI) can map errors to outcomes without matching
on message text.
"""


class MvCalibError(Exception):
    """Base class for all mvcalib errors."""


# --- linear algebra ---------------------------------------------------------

class ShapeMismatchError(MvCalibError):
    """Operand dimensions are incompatible."""


class RankDeficientError(MvCalibError):
    """Homogeneous system has no unique minimizing direction."""


class DegenerateMatrixError(MvCalibError):
    """Matrix is too close to singular for a well-defined rotation factor."""


# --- projection -------------------------------------------------------------

class BehindCameraError(MvCalibError):
    """Point has non-positive depth in the camera frame."""


class DegenerateDepthError(MvCalibError):
    """Homogeneous scale of a projection is numerically zero."""


# --- DLT calibration --------------------------------------------------------

class TooFewPointsError(MvCalibError):
    """Fewer correspondences than the solver needs."""


class DegenerateConfigurationError(MvCalibError):
    """Calibration target is coplanar or otherwise rank deficient."""


class BadGeometryError(MvCalibError):
    """No sign choice puts the scene in front of the camera."""


class NotNormalizedError(MvCalibError):
    """Projection matrix does not satisfy the unit-third-row convention."""


class DegenerateFocalError(MvCalibError):
    """Focal scale extraction hit a non-positive square-root argument."""


# --- registration -----------------------------------------------------------

class DegenerateGeometryError(MvCalibError):
    """Registration points are collinear or coincident."""


class NoConsensusError(MvCalibError):
    """Rounded unified image coordinates disagree between cameras."""


# --- simulator --------------------------------------------------------------

class InvalidSpecError(MvCalibError):
    """Scene specification violates its own invariants."""


class UnsatisfiableError(MvCalibError):
    """No camera pose satisfying the visibility constraints was found."""


class OutOfFrameError(MvCalibError):
    """A rendered dot would not fit inside the image."""


# --- file formats -----------------------------------------------------------

class DataFormatError(MvCalibError):
    """Input file violates its format grammar."""
