"""PGM (netpbm grayscale) reading and writing.

Supports binary P5 and ASCII P2 with maxval 255. Comments (# to end of
line) are accepted anywhere in the header after the magic number. Binary
images serialize with foreground as 255 and background as 0.
"""

from __future__ import annotations

import os

from .errors import DataFormatError
from .features import BinaryImage, GrayImage

import numpy as np


def _header_tokens(data: bytes, start: int, count: int) -> tuple[list[bytes], int]:
    """Next `count` whitespace-separated tokens after `start`, skipping comments."""
    tokens: list[bytes] = []
    i = start
    n = len(data)
    while len(tokens) < count:
        while i < n and data[i : i + 1].isspace():
            i += 1
        if i < n and data[i : i + 1] == b"#":
            while i < n and data[i : i + 1] != b"\n":
                i += 1
            continue
        if i >= n:
            raise DataFormatError("unexpected end of PGM header")
        j = i
        while j < n and not data[j : j + 1].isspace() and data[j : j + 1] != b"#":
            j += 1
        tokens.append(data[i:j])
        i = j
    return tokens, i


def read_pgm(path: str | os.PathLike) -> GrayImage:
    """Load a P5 or P2 PGM file with maxval 255.

    Raises:
        DataFormatError: on any grammar violation.
    """
    with open(path, "rb") as f:
        data = f.read()
    if len(data) < 2:
        raise DataFormatError("file too short to be a PGM")
    magic = data[:2]
    if magic not in (b"P5", b"P2"):
        raise DataFormatError(f"unsupported magic {magic!r}, expected P5 or P2")
    try:
        (w_tok, h_tok, max_tok), pos = _header_tokens(data, 2, 3)
        width, height, maxval = int(w_tok), int(h_tok), int(max_tok)
    except ValueError as e:
        raise DataFormatError(f"malformed PGM header: {e}") from e
    if width < 1 or height < 1:
        raise DataFormatError(f"bad dimensions {width}x{height}")
    if maxval != 255:
        raise DataFormatError(f"only maxval 255 is supported, got {maxval}")
    if magic == b"P5":
        pos += 1  # single whitespace byte terminates the header
        raster = data[pos : pos + width * height]
        if len(raster) != width * height:
            raise DataFormatError(
                f"raster has {len(raster)} bytes, expected {width * height}"
            )
        px = np.frombuffer(raster, dtype=np.uint8).reshape(height, width)
        return GrayImage(px.copy())
    # P2: ASCII samples, comments still allowed
    try:
        tokens, _ = _header_tokens(data, pos, width * height)
        values = [int(t) for t in tokens]
    except (ValueError, DataFormatError) as e:
        raise DataFormatError(f"malformed P2 raster: {e}") from e
    arr = np.array(values, dtype=np.int64).reshape(height, width)
    if arr.min() < 0 or arr.max() > 255:
        raise DataFormatError("P2 sample out of range 0..255")
    return GrayImage(arr.astype(np.uint8))


def write_pgm(
    path: str | os.PathLike,
    img: GrayImage | BinaryImage,
    ascii_format: bool = False,
) -> None:
    """Write a grayscale or binary image as P5 (default) or P2.

    Binary images map True to 255 and False to 0.
    """
    if isinstance(img, BinaryImage):
        px = np.where(img.bits, 255, 0).astype(np.uint8)
    else:
        px = img.pixels
    height, width = px.shape
    if ascii_format:
        lines = [f"P2\n{width} {height}\n255\n"]
        for row in px:
            lines.append(" ".join(str(int(v)) for v in row) + "\n")
        with open(path, "w", encoding="ascii") as f:
            f.writelines(lines)
        return
    with open(path, "wb") as f:
        f.write(f"P5\n{width} {height}\n255\n".encode("ascii"))
        f.write(px.tobytes())
