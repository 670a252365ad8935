"""Multi-camera calibration toolkit.

DLT camera calibration from 3D-2D correspondences, rigid registration of
per-camera local frames into one global frame, unified-projection
verification, and morphological dot detection, plus a synthetic-scene
simulator and text/PGM file formats.
"""

from .dlt import CalibrationResult, Correspondence, build_design_matrix, calibrate, extract_parameters
from .errors import (
    BadGeometryError,
    BehindCameraError,
    DataFormatError,
    DegenerateConfigurationError,
    DegenerateDepthError,
    DegenerateFocalError,
    DegenerateGeometryError,
    DegenerateMatrixError,
    InvalidSpecError,
    MvCalibError,
    NoConsensusError,
    NotNormalizedError,
    OutOfFrameError,
    RankDeficientError,
    ShapeMismatchError,
    TooFewPointsError,
    UnsatisfiableError,
)
from .features import (
    BinaryImage,
    Blob,
    GrayImage,
    binarize,
    connected_components,
    detect_dots,
    estimate_background,
    invert,
    subtract,
)
from .geometry import Point2, Point3, RigidTransform, Rotation3, apply_rigid, compose, inverse
from .numeric import nearest_rotation, solve_homogeneous, solve_least_squares
from .pgm import read_pgm, write_pgm
from .projection import (
    Camera,
    CameraIntrinsics,
    FocalModel,
    ProjectionMatrix,
    ReprojectionReport,
    SensorModel,
    camera_to_pixel,
    image_to_framebuffer,
    project,
    project_matrix,
    reprojection_errors,
    to_matrix,
    world_to_camera,
)
from .registration import (
    FramePair,
    RegisteredCamera,
    UnificationResult,
    build_difference_system,
    estimate_registration,
    register_camera,
    unify_point,
)
from .simulator import (
    NoiseSpec,
    Observation,
    Pattern,
    PatternSpec,
    RigSpec,
    SimulatedCamera,
    generate_pattern,
    generate_rig,
    observe,
    render_dot_image,
)

__version__ = "0.1.0"
