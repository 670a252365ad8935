"""Batch command-line front end.

Subcommands: simulate, calibrate, register, unify, detect. Exit codes:
0 success, 2 usage error, 3 data/format error, 4 numerical error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import fileio, pgm
from .dlt import calibrate as dlt_calibrate
from .errors import DataFormatError, InvalidSpecError, MvCalibError, NoConsensusError
from .features import detect_dots
from .geometry import Point2, Point3, RigidTransform
from .projection import SensorModel, image_to_framebuffer
from .registration import RegisteredCamera, estimate_registration, register_camera, unify_point
from .simulator import (
    NORMAL_TRANSFORM,
    RNG_ALGORITHM,
    NoiseSpec,
    PatternSpec,
    RigSpec,
    generate_pattern,
    generate_rig,
    observe,
    render_dot_image,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERICAL = 4


def _point3(text: str) -> Point3:
    parts = text.split()
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected 'x y z', got {text!r}")
    try:
        return Point3(*(float(p) for p in parts))
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from e


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mvcalib",
        description="Multi-camera DLT calibration, global registration, and unified projection.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="write a synthetic scene bundle with ground truth")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--cameras", type=int, default=4)
    p.add_argument("--dots", type=int, default=19)
    p.add_argument("--noise", type=float, default=0.0, help="pixel noise sigma")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dot-radius", type=int, default=4, help="rendered dot radius in px")
    p.add_argument(
        "--pose-mode",
        choices=("shared", "distinct"),
        default="shared",
        help="shared: one physical pose in per-camera local frames (unifiable); "
        "distinct: independent poses",
    )

    p = sub.add_parser("calibrate", help="DLT-calibrate one camera from correspondences")
    p.add_argument("--world", required=True, help="world-points file (id x y z)")
    p.add_argument("--image", required=True, help="image-points file (id u v)")
    p.add_argument("--out", required=True, help="camera file to write")
    p.add_argument("--report", action="store_true", help="print per-axis mean errors")
    p.add_argument(
        "--report-dir",
        help="directory for residuals.csv, reprojection.png and report.txt",
    )

    p = sub.add_parser("register", help="re-express a camera in the global frame")
    p.add_argument("--pairs", required=True, help="frame-pairs file (id lx ly lz gx gy gz)")
    p.add_argument("--camera", required=True, help="camera file calibrated in the local frame")
    p.add_argument("--out", required=True, help="registered camera file to write")

    p = sub.add_parser("unify", help="project one world point through several cameras")
    p.add_argument("--cameras", required=True, nargs="+", help="registered camera files")
    p.add_argument("--point", required=True, type=_point3, help="global point as 'x y z'")
    p.add_argument("--round", action="store_true", help="round to integers and require consensus")
    p.add_argument("--pixel", action="store_true", help="convert to frame-buffer pixels")
    p.add_argument("--width", type=int, help="image width for --pixel")
    p.add_argument("--height", type=int, help="image height for --pixel")

    p = sub.add_parser("detect", help="detect calibration dots in a PGM image")
    p.add_argument("--image", required=True, help="input PGM (P5 or P2)")
    p.add_argument("--threshold", type=int, default=128)
    p.add_argument("--radius", type=int, default=7, help="background opening radius")
    p.add_argument("--min-pixels", type=int, default=1)
    p.add_argument("--out", required=True, help="blob CSV to write")

    return parser


def _cmd_simulate(args: argparse.Namespace) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    pattern = generate_pattern(PatternSpec(dot_count=args.dots), seed=args.seed)
    rig_spec = RigSpec(
        camera_count=args.cameras,
        shared_pose=args.pose_mode == "shared",
        min_dot_separation_px=2.0 * args.dot_radius + 4.0,
    )
    rig = generate_rig(rig_spec, pattern, seed=args.seed + 1)
    ids = [str(i) for i in range(len(pattern.dots))]
    fileio.write_world_points(
        out / "pattern_global.txt", zip(ids, pattern.dots)
    )
    for index, sim in enumerate(rig, start=1):
        noise = NoiseSpec(sigma=args.noise, seed=args.seed + 100 + index)
        obs = observe(sim, pattern, noise)
        calib_ids = [ids[i] for i in pattern.calibration_indices]
        fileio.write_world_points(
            out / f"cam{index}_world.txt",
            zip(calib_ids, (c.world for c in obs.calibration)),
        )
        fileio.write_image_points(
            out / f"cam{index}_image.txt",
            zip(calib_ids, (c.pixel for c in obs.calibration)),
        )
        fileio.write_frame_pairs(
            out / f"cam{index}_pairs.txt",
            [ids[i] for i in pattern.registration_indices],
            obs.frame_pair,
        )
        fileio.write_camera(out / f"cam{index}_truth_global.txt", sim.camera)
        fileio.write_camera(out / f"cam{index}_truth_local.txt", sim.local_camera())
        pgm.write_pgm(
            out / f"cam{index}.pgm",
            render_dot_image(
                sim.camera, pattern, rig_spec.width, rig_spec.height, args.dot_radius
            ),
        )
    metadata = {
        "cameras": args.cameras,
        "dots": args.dots,
        "noise_sigma": args.noise,
        "pose_mode": args.pose_mode,
        "seed": args.seed,
        "rng": RNG_ALGORITHM,
        "normal_transform": NORMAL_TRANSFORM,
        "calibration_indices": list(pattern.calibration_indices),
        "registration_indices": list(pattern.registration_indices),
        "image_size": [rig_spec.width, rig_spec.height],
        "dot_radius_px": args.dot_radius,
    }
    with open(out / "metadata.json", "w", encoding="utf-8") as f:
        json.dump(metadata, f, indent=2, sort_keys=True)
        f.write("\n")
    print(f"wrote scene bundle ({args.cameras} cameras, {args.dots} dots) to {out}")
    return EXIT_OK


def _cmd_calibrate(args: argparse.Namespace) -> int:
    from . import report  # defers the matplotlib import to the one path using it

    world = fileio.read_world_points(args.world)
    image = fileio.read_image_points(args.image)
    corrs = fileio.join_correspondences(world, image)
    result = dlt_calibrate(corrs)
    fileio.write_camera(args.out, result.camera, result.matrix)
    table = report.error_table(result, name=Path(args.out).stem)
    if args.report:
        print(table)
    if args.report_dir:
        rdir = Path(args.report_dir)
        rdir.mkdir(parents=True, exist_ok=True)
        report.write_residuals_csv(rdir / "residuals.csv", corrs, result)
        report.render_reprojection_figure(rdir / "reprojection.png", corrs, result)
        (rdir / "report.txt").write_text(table + "\n", encoding="utf-8")
    return EXIT_OK


def _cmd_register(args: argparse.Namespace) -> int:
    pair = fileio.read_frame_pairs(args.pairs)
    camera, _ = fileio.read_camera(args.camera)
    frame = estimate_registration(pair)
    registered = register_camera(camera, frame)
    fileio.write_camera(args.out, registered.camera)
    return EXIT_OK


def _round_half_away(x: float) -> int:
    return math.floor(x + 0.5) if x >= 0.0 else math.ceil(x - 0.5)


def _cmd_unify(args: argparse.Namespace) -> int:
    if args.pixel and (args.width is None or args.height is None):
        print("error: --pixel requires --width and --height", file=sys.stderr)
        return EXIT_USAGE
    cams = []
    for path in args.cameras:
        camera, _ = fileio.read_camera(path)
        cams.append(
            RegisteredCamera(camera=camera, frame_transform=RigidTransform.identity())
        )
    result = unify_point(cams, args.point, round_to_int=False)
    values = list(result.per_camera)
    if args.pixel:
        sensor = SensorModel(dx=1.0, dy=1.0, cx=args.width / 2.0, cy=args.height / 2.0)
        values = [image_to_framebuffer(sensor, v) for v in values]
    max_dev = 0.0
    for i in range(len(values)):
        for j in range(i + 1, len(values)):
            max_dev = max(
                max_dev,
                math.hypot(values[i].u - values[j].u, values[i].v - values[j].v),
            )
    if args.round:
        rounded = [(_round_half_away(v.u), _round_half_away(v.v)) for v in values]
        if any(r != rounded[0] for r in rounded[1:]):
            raise NoConsensusError(
                "rounded coordinates disagree: "
                + ", ".join(f"({u}, {v})" for u, v in rounded)
            )
        for path, (u, v) in zip(args.cameras, rounded):
            print(f"{path}: {u} {v}")
        print(f"consensus: {rounded[0][0]} {rounded[0][1]}")
    else:
        for path, v in zip(args.cameras, values):
            print(f"{path}: {v.u:.6f} {v.v:.6f}")
        print(f"consensus: {values[0].u:.6f} {values[0].v:.6f}")
    print(f"max deviation: {max_dev:.6g}")
    return EXIT_OK


def _cmd_detect(args: argparse.Namespace) -> int:
    img = pgm.read_pgm(args.image)
    blobs = detect_dots(
        img,
        threshold=args.threshold,
        radius=args.radius,
        min_pixels=args.min_pixels,
    )
    fileio.write_blob_csv(args.out, blobs)
    print(f"detected {len(blobs)} blobs in {args.image}")
    return EXIT_OK


_COMMANDS = {
    "simulate": _cmd_simulate,
    "calibrate": _cmd_calibrate,
    "register": _cmd_register,
    "unify": _cmd_unify,
    "detect": _cmd_detect,
}


def run(argv: list[str]) -> int:
    """Parse argv and execute one subcommand, mapping errors to exit codes."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except (DataFormatError, InvalidSpecError) as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_DATA
    except MvCalibError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
