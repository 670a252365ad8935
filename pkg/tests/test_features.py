import numpy as np
import pytest

from mvcalib.errors import ShapeMismatchError
from mvcalib.features import (
    BinaryImage,
    GrayImage,
    binarize,
    connected_components,
    detect_dots,
    estimate_background,
    invert,
    subtract,
)


def gray(arr):
    return GrayImage(np.asarray(arr, dtype=np.uint8))


def bits(arr):
    return BinaryImage(np.asarray(arr, dtype=bool))


# --- brute-force oracles ------------------------------------------------


def erode_oracle(b, radius):
    h, w = b.shape
    out = np.zeros_like(b)
    for r in range(h):
        for c in range(w):
            ok = True
            for dr in range(-radius, radius + 1):
                for dc in range(-radius, radius + 1):
                    rr, cc = r + dr, c + dc
                    if not (0 <= rr < h and 0 <= cc < w) or not b[rr, cc]:
                        ok = False
                        break
                if not ok:
                    break
            out[r, c] = ok
    return out


def dilate_oracle(b, radius):
    h, w = b.shape
    out = np.zeros_like(b)
    for r in range(h):
        for c in range(w):
            hit = False
            for dr in range(-radius, radius + 1):
                for dc in range(-radius, radius + 1):
                    rr, cc = r + dr, c + dc
                    if 0 <= rr < h and 0 <= cc < w and b[rr, cc]:
                        hit = True
                        break
                if hit:
                    break
            out[r, c] = hit
    return out


def flood_fill_oracle(b, min_pixels):
    """8-connectivity component labeling by BFS; returns (count, centroid) list."""
    h, w = b.shape
    seen = np.zeros_like(b, dtype=bool)
    blobs = []
    for r in range(h):
        for c in range(w):
            if not b[r, c] or seen[r, c]:
                continue
            stack = [(r, c)]
            seen[r, c] = True
            members = []
            while stack:
                rr, cc = stack.pop()
                members.append((rr, cc))
                for dr in (-1, 0, 1):
                    for dc in (-1, 0, 1):
                        nr, nc = rr + dr, cc + dc
                        if 0 <= nr < h and 0 <= nc < w and b[nr, nc] and not seen[nr, nc]:
                            seen[nr, nc] = True
                            stack.append((nr, nc))
            if len(members) >= min_pixels:
                vs = [m[0] for m in members]
                us = [m[1] for m in members]
                blobs.append((len(members), np.mean(us), np.mean(vs)))
    blobs.sort(key=lambda t: (t[2], t[1]))
    return blobs


# --- binarize / invert / subtract ----------------------------------------


def test_binarize_all_zero_and_all_white():
    assert not binarize(gray(np.zeros((4, 5))), 128).bits.any()
    assert binarize(gray(np.full((4, 5), 255)), 128).bits.all()


def test_binarize_checkerboard():
    img = np.full((6, 6), 100, dtype=np.uint8)
    img[::2, ::2] = 200
    img[1::2, 1::2] = 200
    out = binarize(gray(img), 150)
    np.testing.assert_array_equal(out.bits, img == 200)


def test_binarize_monotone_in_threshold():
    rng = np.random.default_rng(70)
    img = gray(rng.integers(0, 256, size=(16, 16)))
    prev = binarize(img, 0).bits
    for thr in (32, 96, 160, 255):
        cur = binarize(img, thr).bits
        assert not (cur & ~prev).any()  # raising threshold never adds pixels
        prev = cur


def test_invert_involution_and_singletons():
    assert invert(bits(np.zeros((3, 3)))).bits.all()
    rng = np.random.default_rng(71)
    b = bits(rng.random((8, 8)) > 0.5)
    np.testing.assert_array_equal(invert(invert(b)).bits, b.bits)
    single = np.zeros((5, 5), dtype=bool)
    single[2, 3] = True
    out = invert(bits(single))
    assert not out.bits[2, 3] and out.bits.sum() == 24


def test_subtract_laws():
    rng = np.random.default_rng(72)
    x = bits(rng.random((6, 7)) > 0.5)
    empty = bits(np.zeros((6, 7)))
    np.testing.assert_array_equal(subtract(x, empty).bits, x.bits)
    assert not subtract(x, x).bits.any()
    full = bits(np.ones((6, 7)))
    np.testing.assert_array_equal(subtract(full, x).bits, invert(x).bits)


def test_subtract_shape_mismatch():
    with pytest.raises(ShapeMismatchError):
        subtract(bits(np.zeros((3, 3))), bits(np.zeros((3, 4))))


# --- background estimation ------------------------------------------------


def test_opening_of_all_true_large_image():
    # erosion clears a border band, dilation regrows it: all-true survives
    out = estimate_background(bits(np.ones((9, 9))), radius=2)
    assert out.bits.all()


def test_opening_of_all_true_too_small_image():
    # the element never fits, so erosion empties the image
    out = estimate_background(bits(np.ones((3, 3))), radius=2)
    assert not out.bits.any()


def test_single_pixel_removed():
    b = np.zeros((7, 7), dtype=bool)
    b[3, 3] = True
    assert not estimate_background(bits(b), radius=1).bits.any()


def test_large_block_survives_opening():
    b = np.zeros((32, 32), dtype=bool)
    b[4:24, 6:26] = True
    out = estimate_background(bits(b), radius=2)
    expected = dilate_oracle(erode_oracle(b, 2), 2)
    np.testing.assert_array_equal(out.bits, expected)
    assert out.bits[10, 10]  # interior preserved


def test_opening_matches_brute_force_on_random_images():
    rng = np.random.default_rng(73)
    for _ in range(10):
        b = rng.random((20, 24)) > 0.4
        for radius in (1, 2):
            got = estimate_background(bits(b), radius).bits
            expected = dilate_oracle(erode_oracle(b, radius), radius)
            np.testing.assert_array_equal(got, expected)


def test_background_subtraction_leaves_only_small_structures():
    rng = np.random.default_rng(74)
    for _ in range(5):
        b = rng.random((24, 24)) > 0.45
        radius = 2
        cleaned = subtract(bits(b), estimate_background(bits(b), radius)).bits
        survived = dilate_oracle(erode_oracle(cleaned, radius), radius)
        assert not survived.any()  # nothing opening-stable remains


# --- connected components -------------------------------------------------


def test_single_pixel_blob():
    b = np.zeros((32, 32), dtype=bool)
    b[20, 10] = True  # row 20 (v), col 10 (u)
    blobs = connected_components(bits(b), min_pixels=1)
    assert len(blobs) == 1
    assert blobs[0].pixel_count == 1
    assert (blobs[0].centroid.u, blobs[0].centroid.v) == (10.0, 20.0)


def test_square_block_centroid():
    b = np.zeros((20, 20), dtype=bool)
    b[10:12, 10:12] = True
    blobs = connected_components(bits(b), min_pixels=1)
    assert len(blobs) == 1
    assert blobs[0].pixel_count == 4
    assert (blobs[0].centroid.u, blobs[0].centroid.v) == (10.5, 10.5)


def test_separation_and_diagonal_merging():
    b = np.zeros((10, 10), dtype=bool)
    b[2, 2] = True
    b[2, 5] = True  # two empties apart: separate blobs
    assert len(connected_components(bits(b), 1)) == 2
    b2 = np.zeros((10, 10), dtype=bool)
    b2[2, 2] = True
    b2[3, 3] = True  # diagonal neighbors merge under 8-connectivity
    assert len(connected_components(bits(b2), 1)) == 1


def test_matches_flood_fill_oracle():
    rng = np.random.default_rng(75)
    for _ in range(10):
        b = rng.random((24, 28)) > 0.7
        for min_pixels in (1, 3):
            got = connected_components(bits(b), min_pixels)
            expected = flood_fill_oracle(b, min_pixels)
            assert len(got) == len(expected)
            for blob, (n, u, v) in zip(got, expected):
                assert blob.pixel_count == n
                assert blob.centroid.u == pytest.approx(u, abs=1e-12)
                assert blob.centroid.v == pytest.approx(v, abs=1e-12)


def test_partition_property():
    rng = np.random.default_rng(76)
    b = rng.random((30, 30)) > 0.6
    blobs = connected_components(bits(b), min_pixels=2)
    assert sum(bl.pixel_count for bl in blobs) <= int(b.sum())
    labels = sorted(bl.label for bl in blobs)
    assert labels == list(range(1, len(blobs) + 1))


# --- full pipeline ----------------------------------------------------------


def disc_image(centers, radius, shape=(64, 64)):
    """Dark discs on a light field, like a rendered calibration sheet."""
    img = np.full(shape, 230, dtype=np.uint8)
    for cv, cu in centers:
        for r in range(cv - radius, cv + radius + 1):
            for c in range(cu - radius, cu + radius + 1):
                if (r - cv) ** 2 + (c - cu) ** 2 <= radius**2:
                    img[r, c] = 20
    return img


def test_detect_dots_blank_image():
    assert detect_dots(gray(np.full((40, 40), 230)), 128, 3, 1) == []


def test_detect_dots_two_discs_and_a_speck():
    img = disc_image([(20, 20), (40, 44)], radius=3)
    img[5, 55] = 20  # 1-pixel speck
    blobs = detect_dots(gray(img), threshold=128, radius=5, min_pixels=4)
    assert len(blobs) == 2
    assert {(round(b.centroid.u), round(b.centroid.v)) for b in blobs} == {
        (20, 20),
        (44, 40),
    }
    with_speck = detect_dots(gray(img), threshold=128, radius=5, min_pixels=1)
    assert len(with_speck) == 3


def test_detect_dots_translation_equivariance():
    base = disc_image([(20, 18), (35, 40)], radius=4, shape=(64, 64))
    du, dv = 6, 9
    shifted = np.full_like(base, 230)
    shifted[dv:, du:] = base[:-dv, :-du]
    a = detect_dots(gray(base), 128, 6, 1)
    b = detect_dots(gray(shifted), 128, 6, 1)
    assert len(a) == len(b) == 2
    for ba, bb in zip(a, b):
        assert bb.centroid.u - ba.centroid.u == pytest.approx(du, abs=1e-9)
        assert bb.centroid.v - ba.centroid.v == pytest.approx(dv, abs=1e-9)


def test_gray_image_validation():
    with pytest.raises(ValueError):
        GrayImage(np.zeros((0, 4), dtype=np.uint8))
    with pytest.raises(ValueError):
        GrayImage(np.full((2, 2), 300, dtype=np.int32))
    img = GrayImage(np.array([[1, 2], [3, 4]], dtype=np.int64))
    assert img.pixels.dtype == np.uint8
    assert (img.width, img.height) == (2, 2)
