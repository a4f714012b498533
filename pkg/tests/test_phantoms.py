import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from scatterkit.forward import Grid
from scatterkit.phantoms import (
    BUNDLED_DIGITS, ImageError, bump_contrast, contrast_to_pixels, digit_image, image_contrast,
    read_pgm, write_pgm,
)


def test_bump_center_and_support():
    g = Grid(33)
    m = bump_contrast(g)
    centre = np.argmin(np.linalg.norm(g.centers, axis=1))
    assert np.linalg.norm(g.centers[centre]) == 0
    assert m[centre] == pytest.approx(np.exp(-1), rel=1e-15)
    outside = np.linalg.norm(g.centers, axis=1) >= 1
    assert np.all(m[outside] == 0)
    assert np.all((m.real >= 0) & (m.real <= np.exp(-1))) and np.all(m.imag == 0)


def test_bump_radial_symmetry():
    g = Grid(16)
    img = g.to_image(bump_contrast(g))
    # p -> -p maps the rows/columns with p in [-N/2+1, N/2-1] onto themselves
    inner = img[:-1, :-1]
    np.testing.assert_array_equal(inner, inner[::-1, ::-1])
    np.testing.assert_array_equal(inner, inner.T)


def test_image_contrast_black_white():
    g = Grid(28)
    assert not image_contrast(g, np.zeros((28, 28))).any()
    np.testing.assert_array_equal(image_contrast(g, np.full((28, 28), 255)), 1)
    np.testing.assert_allclose(image_contrast(g, np.full((28, 28), 255), scale=0.5), 0.5)


def test_image_contrast_single_pixel():
    g = Grid(28)
    img = np.zeros((28, 28))
    img[3, 20] = 255
    m = image_contrast(g, img)
    assert np.count_nonzero(m) == 1
    k = int(np.flatnonzero(m)[0])
    assert m[k] == 1
    # row 3 from the top is high in x2; column 20 is right of centre in x1
    assert g.centers[k, 0] > 0 and g.centers[k, 1] > 0


def test_image_contrast_display_round_trip():
    g = Grid(28)
    img = np.random.default_rng(0).integers(0, 256, (28, 28))
    m = image_contrast(g, img)
    np.testing.assert_allclose(contrast_to_pixels(g, m, 1.0), img, atol=1e-9)


def test_image_contrast_rejects_bad_raster():
    with pytest.raises(ImageError):
        image_contrast(Grid(4), np.zeros(5))


@settings(max_examples=30, deadline=None)
@given(h=st.integers(1, 12), w=st.integers(1, 12), seed=st.integers(0, 2**16))
def test_pgm_round_trip(tmp_path_factory, h, w, seed):
    img = np.random.default_rng(seed).integers(0, 256, (h, w)).astype(np.uint8)
    path = tmp_path_factory.mktemp("pgm") / "x.pgm"
    write_pgm(path, img)
    np.testing.assert_array_equal(read_pgm(path), img)


def test_pgm_header_with_comment(tmp_path):
    path = tmp_path / "c.pgm"
    path.write_bytes(b"P5\n# made by hand\n2 1\n255\n\x07\xff")
    np.testing.assert_array_equal(read_pgm(path), [[7, 255]])


@pytest.mark.parametrize("raw", [b"P2\n1 1\n255\n0", b"P5\n2 2\n255\n\x00", b"P5\n1 1\n65535\n\x00\x00"])
def test_pgm_rejects_bad_files(tmp_path, raw):
    path = tmp_path / "bad.pgm"
    path.write_bytes(raw)
    with pytest.raises(ImageError):
        read_pgm(path)


def test_pgm_missing_file(tmp_path):
    with pytest.raises(ImageError):
        read_pgm(tmp_path / "nope.pgm")


@pytest.mark.parametrize("name", BUNDLED_DIGITS)
def test_bundled_digits(name):
    img = digit_image(name)
    assert img.shape == (28, 28) and img.dtype == np.uint8
    assert img.max() == 255 and img.min() == 0
    m = image_contrast(Grid(32), img)
    assert 0 < np.abs(m).max() <= 1


def test_unknown_digit():
    with pytest.raises(ImageError):
        digit_image("5")
