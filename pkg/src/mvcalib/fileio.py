"""Line-oriented text formats for scene data and cameras.

All files are UTF-8 with `#` comments and whitespace-separated fields:

    world-points   id x y z
    image-points   id u v          (ids join against a world-points file)
    frame-pairs    id lx ly lz gx gy gz
    camera         header line `mvcalib-camera v1`, then a record `M` with
                   3 rows of 4, `K alpha_u alpha_v u0 v0`, a record `R`
                   with 3 rows of 3, and `T tx ty tz`
    blob CSV       header `label,count,u,v`

Floats serialize with 17 significant digits, which round-trips 64-bit
values exactly.
"""

from __future__ import annotations

import os
from typing import Iterable, Sequence

import numpy as np

from .dlt import Correspondence
from .errors import DataFormatError
from .features import Blob
from .geometry import Point2, Point3, RigidTransform, Rotation3
from .projection import Camera, CameraIntrinsics, ProjectionMatrix, to_matrix
from .registration import FramePair

CAMERA_HEADER = "mvcalib-camera v1"


def format_float(x: float) -> str:
    return f"{x:.17g}"


def _content_lines(path: str | os.PathLike) -> list[tuple[int, list[str]]]:
    """Non-empty lines as (line number, fields), comments stripped."""
    out = []
    with open(path, "r", encoding="utf-8") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.split("#", 1)[0].strip()
            if line:
                out.append((lineno, line.split()))
    return out


def _parse_floats(path, lineno: int, fields: Sequence[str]) -> list[float]:
    try:
        return [float(f) for f in fields]
    except ValueError as e:
        raise DataFormatError(f"{path}:{lineno}: {e}") from e


def _read_id_rows(path, n_values: int, kind: str) -> list[tuple[str, list[float]]]:
    rows = []
    seen = set()
    for lineno, fields in _content_lines(path):
        if len(fields) != 1 + n_values:
            raise DataFormatError(
                f"{path}:{lineno}: expected 'id' plus {n_values} values, got {len(fields)} fields"
            )
        key = fields[0]
        if key in seen:
            raise DataFormatError(f"{path}:{lineno}: duplicate {kind} id {key!r}")
        seen.add(key)
        rows.append((key, _parse_floats(path, lineno, fields[1:])))
    if not rows:
        raise DataFormatError(f"{path}: no {kind} entries found")
    return rows


def read_world_points(path: str | os.PathLike) -> list[tuple[str, Point3]]:
    return [
        (key, Point3(x, y, z))
        for key, (x, y, z) in _read_id_rows(path, 3, "world point")
    ]


def read_image_points(path: str | os.PathLike) -> list[tuple[str, Point2]]:
    return [
        (key, Point2(u, v)) for key, (u, v) in _read_id_rows(path, 2, "image point")
    ]


def write_world_points(path, points: Iterable[tuple[str, Point3]]) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write("# id x y z\n")
        for key, p in points:
            f.write(
                f"{key} {format_float(p.x)} {format_float(p.y)} {format_float(p.z)}\n"
            )


def write_image_points(path, points: Iterable[tuple[str, Point2]]) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write("# id u v\n")
        for key, p in points:
            f.write(f"{key} {format_float(p.u)} {format_float(p.v)}\n")


def join_correspondences(
    world: Sequence[tuple[str, Point3]],
    image: Sequence[tuple[str, Point2]],
) -> list[Correspondence]:
    """Match image points to world points by id, ordered by the world file.

    Raises:
        DataFormatError: if an image id has no world counterpart.
    """
    pixels = dict(image)
    unknown = [key for key in pixels if key not in {k for k, _ in world}]
    if unknown:
        raise DataFormatError(f"image ids missing from world points: {sorted(unknown)}")
    return [
        Correspondence(world=p, pixel=pixels[key])
        for key, p in world
        if key in pixels
    ]


def read_frame_pairs(path: str | os.PathLike) -> FramePair:
    rows = _read_id_rows(path, 6, "frame pair")
    local = tuple(Point3(*vals[:3]) for _, vals in rows)
    global_ = tuple(Point3(*vals[3:]) for _, vals in rows)
    try:
        return FramePair(local=local, global_=global_)
    except ValueError as e:
        raise DataFormatError(f"{path}: {e}") from e


def write_frame_pairs(
    path, ids: Sequence[str], pair: FramePair
) -> None:
    if len(ids) != len(pair):
        raise ValueError("id list and frame pair lengths differ")
    with open(path, "w", encoding="utf-8") as f:
        f.write("# id lx ly lz gx gy gz\n")
        for key, lp, gp in zip(ids, pair.local, pair.global_):
            f.write(
                " ".join(
                    [key]
                    + [format_float(v) for v in (lp.x, lp.y, lp.z, gp.x, gp.y, gp.z)]
                )
                + "\n"
            )


def write_camera(
    path, camera: Camera, matrix: ProjectionMatrix | None = None
) -> None:
    """Serialize a camera; the projection matrix defaults to to_matrix(camera)."""
    m = (matrix if matrix is not None else to_matrix(camera)).matrix
    k = camera.intrinsics
    r = camera.extrinsics.rotation.matrix
    t = camera.extrinsics.translation
    with open(path, "w", encoding="utf-8") as f:
        f.write(CAMERA_HEADER + "\n")
        f.write("M\n")
        for row in m:
            f.write(" ".join(format_float(v) for v in row) + "\n")
        f.write(
            "K "
            + " ".join(format_float(v) for v in (k.alpha_u, k.alpha_v, k.u0, k.v0))
            + "\n"
        )
        f.write("R\n")
        for row in r:
            f.write(" ".join(format_float(v) for v in row) + "\n")
        f.write("T " + " ".join(format_float(v) for v in t) + "\n")


def read_camera(path: str | os.PathLike) -> tuple[Camera, ProjectionMatrix]:
    """Parse a camera file back into (Camera, ProjectionMatrix).

    Raises:
        DataFormatError: on any grammar or validity violation.
    """
    lines = _content_lines(path)
    if not lines or lines[0][1] != CAMERA_HEADER.split():
        raise DataFormatError(f"{path}: missing header {CAMERA_HEADER!r}")
    body = lines[1:]

    def take(i: int, expected: int, what: str) -> list[float]:
        if i >= len(body):
            raise DataFormatError(f"{path}: truncated camera file, missing {what}")
        lineno, fields = body[i]
        if len(fields) != expected:
            raise DataFormatError(
                f"{path}:{lineno}: {what} needs {expected} fields, got {len(fields)}"
            )
        return _parse_floats(path, lineno, fields)

    idx = 0
    if body[idx][1] != ["M"]:
        raise DataFormatError(f"{path}: expected record 'M'")
    idx += 1
    m_rows = [take(idx + i, 4, "projection matrix row") for i in range(3)]
    idx += 3
    lineno, fields = body[idx] if idx < len(body) else (0, [])
    if not fields or fields[0] != "K" or len(fields) != 5:
        raise DataFormatError(f"{path}: expected 'K alpha_u alpha_v u0 v0'")
    k_vals = _parse_floats(path, lineno, fields[1:])
    idx += 1
    if idx >= len(body) or body[idx][1] != ["R"]:
        raise DataFormatError(f"{path}: expected record 'R'")
    idx += 1
    r_rows = [take(idx + i, 3, "rotation row") for i in range(3)]
    idx += 3
    lineno, fields = body[idx] if idx < len(body) else (0, [])
    if not fields or fields[0] != "T" or len(fields) != 4:
        raise DataFormatError(f"{path}: expected 'T tx ty tz'")
    t_vals = _parse_floats(path, lineno, fields[1:])
    if idx + 1 != len(body):
        raise DataFormatError(f"{path}: trailing content after camera record")
    try:
        camera = Camera(
            intrinsics=CameraIntrinsics(*k_vals),
            extrinsics=RigidTransform(Rotation3(np.array(r_rows)), np.array(t_vals)),
        )
        matrix = ProjectionMatrix(np.array(m_rows))
    except ValueError as e:
        raise DataFormatError(f"{path}: {e}") from e
    return camera, matrix


def write_blob_csv(path, blobs: Sequence[Blob]) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write("label,count,u,v\n")
        for b in blobs:
            f.write(
                f"{b.label},{b.pixel_count},"
                f"{format_float(b.centroid.u)},{format_float(b.centroid.v)}\n"
            )
