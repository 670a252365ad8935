"""Morphological dot detection on grayscale calibration images.

Pipeline: binarize, invert (dots are dark on a light field), estimate the
background by morphological opening, subtract it, then label 8-connected
components and take their centroids. Coordinates follow the image
convention: u is the column index, v the row index, origin at the top-left
pixel center.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import ShapeMismatchError
from .geometry import Point2

#: 8-connectivity structuring element for component labeling.
_CONNECT8 = np.ones((3, 3), dtype=bool)


@dataclass(frozen=True, eq=False)
class GrayImage:
    """Row-major 8-bit grayscale image."""

    pixels: np.ndarray

    def __post_init__(self) -> None:
        px = np.asarray(self.pixels)
        if px.ndim != 2 or px.size == 0:
            raise ValueError(f"expected a non-empty 2D pixel grid, got shape {px.shape}")
        if px.dtype != np.uint8:
            if not np.issubdtype(px.dtype, np.integer):
                raise ValueError(f"pixel dtype must be integral, got {px.dtype}")
            if px.min() < 0 or px.max() > 255:
                raise ValueError("pixel intensities must lie in 0..255")
            px = px.astype(np.uint8)
        else:
            px = px.copy()
        px.flags.writeable = False
        object.__setattr__(self, "pixels", px)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


@dataclass(frozen=True, eq=False)
class BinaryImage:
    """Row-major boolean image; True marks foreground."""

    bits: np.ndarray

    def __post_init__(self) -> None:
        b = np.asarray(self.bits)
        if b.ndim != 2 or b.size == 0:
            raise ValueError(f"expected a non-empty 2D bit grid, got shape {b.shape}")
        b = b.astype(bool)
        b.flags.writeable = False
        object.__setattr__(self, "bits", b)

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def height(self) -> int:
        return self.bits.shape[0]


@dataclass(frozen=True)
class Blob:
    """A connected foreground component with its sub-pixel centroid."""

    label: int
    pixel_count: int
    centroid: Point2


def binarize(img: GrayImage, threshold: int) -> BinaryImage:
    """Foreground where intensity >= threshold."""
    return BinaryImage(img.pixels >= threshold)


def invert(img: BinaryImage) -> BinaryImage:
    """Bitwise negation; its own inverse."""
    return BinaryImage(~img.bits)


def estimate_background(img: BinaryImage, radius: int) -> BinaryImage:
    """Morphological opening with a (2*radius+1) square element.

    Erosion then dilation, treating everything outside the image as
    background, removes foreground structures smaller than the element and
    keeps what remains: an estimate of the large-scale background.
    """
    if radius < 1:
        raise ValueError(f"radius must be >= 1, got {radius}")
    size = 2 * radius + 1
    # Separable min/max filters with zero padding implement square-element
    # erosion/dilation with out-of-image pixels treated as False.
    eroded = ndimage.minimum_filter(
        img.bits.astype(np.uint8), size=size, mode="constant", cval=0
    )
    opened = ndimage.maximum_filter(eroded, size=size, mode="constant", cval=0)
    return BinaryImage(opened.astype(bool))


def subtract(img: BinaryImage, background: BinaryImage) -> BinaryImage:
    """Keep foreground not explained by the background: img AND NOT background."""
    if img.bits.shape != background.bits.shape:
        raise ShapeMismatchError(
            f"image {img.bits.shape} and background {background.bits.shape} differ"
        )
    return BinaryImage(img.bits & ~background.bits)


def connected_components(img: BinaryImage, min_pixels: int = 1) -> list[Blob]:
    """Label 8-connected foreground components and centroid them.

    Components smaller than min_pixels are dropped. Centroids are arithmetic
    means of member pixel coordinates (pixel centers at integer positions).
    Blobs come back sorted by (centroid.v, centroid.u) and are relabeled
    1..k in that order.
    """
    if min_pixels < 1:
        raise ValueError(f"min_pixels must be >= 1, got {min_pixels}")
    labels, count = ndimage.label(img.bits, structure=_CONNECT8)
    if count == 0:
        return []
    rows, cols = np.nonzero(labels)
    which = labels[rows, cols]
    sizes = np.bincount(which, minlength=count + 1)
    sum_v = np.bincount(which, weights=rows, minlength=count + 1)
    sum_u = np.bincount(which, weights=cols, minlength=count + 1)
    blobs = []
    for lab in range(1, count + 1):
        n = int(sizes[lab])
        if n < min_pixels:
            continue
        blobs.append((sum_v[lab] / n, sum_u[lab] / n, n))
    blobs.sort(key=lambda b: (b[0], b[1]))
    return [
        Blob(label=i + 1, pixel_count=n, centroid=Point2(u, v))
        for i, (v, u, n) in enumerate(blobs)
    ]


def detect_dots(
    img: GrayImage,
    threshold: int = 128,
    radius: int = 7,
    min_pixels: int = 1,
) -> list[Blob]:
    """Run the full detection sequence on a grayscale image.

    binarize -> invert -> estimate_background -> subtract ->
    connected_components, in that order.
    """
    binary = binarize(img, threshold)
    inverted = invert(binary)
    background = estimate_background(inverted, radius)
    cleaned = subtract(inverted, background)
    return connected_components(cleaned, min_pixels)
