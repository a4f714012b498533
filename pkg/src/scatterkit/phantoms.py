"""Ground-truth contrasts and binary PGM (P5) input/output."""

import re
from importlib import resources

import numpy as np

from .numeric import ContractError


class ImageError(ValueError):
    """Raised for unreadable or unsupported PGM input."""


def bump_contrast(grid):
    """Smooth bump ``exp(-1/(1-|x|^2))`` inside the unit disc, 0 outside."""
    c = grid.centers
    r2 = c[:, 0] ** 2 + c[:, 1] ** 2
    inside = r2 < 1.0
    out = np.zeros(grid.M, dtype=complex)
    out[inside] = np.exp(-1.0 / (1.0 - r2[inside]))
    return out


def image_contrast(grid, image, scale=1.0):
    """Contrast ``scale * gray/255`` from a grayscale raster.

    The image is stretched over the whole region by nearest-neighbour
    sampling.  Row 0 of the raster is the top edge (largest ``x_2``) and
    column 0 the left edge (smallest ``x_1``).
    """
    img = np.asarray(image)
    if img.ndim != 2 or img.size == 0:
        raise ImageError(f"expected a non-empty 2-D grayscale raster, got shape {img.shape}")
    H, W = img.shape
    N = grid.N
    ix = grid.lattice[:, 0] - grid.p_range[0]
    iy = grid.lattice[:, 1] - grid.p_range[0]
    col = (ix * W) // N
    row = H - 1 - (iy * H) // N
    gray = img[row, col].astype(float)
    return (scale * gray / 255.0).astype(complex)


_HEADER = re.compile(rb"P5(?:\s+|#[^\n]*\n)+(\d+)(?:\s+|#[^\n]*\n)+(\d+)(?:\s+|#[^\n]*\n)+(\d+)\s")


def read_pgm(path):
    """Read an 8-bit binary PGM into a (rows, cols) uint8 array."""
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise ImageError(f"cannot read {path}: {exc}") from exc
    m = _HEADER.match(raw)
    if m is None:
        raise ImageError(f"{path}: not a binary PGM (P5) file")
    width, height, maxval = (int(g) for g in m.groups())
    if maxval != 255:
        raise ImageError(f"{path}: only maxval 255 is supported, got {maxval}")
    body = raw[m.end():]
    if len(body) < width * height:
        raise ImageError(f"{path}: truncated pixel data")
    return np.frombuffer(body[: width * height], dtype=np.uint8).reshape(height, width).copy()


BUNDLED_DIGITS = ("0", "1", "7")


def digit_image(name):
    """One of the bundled 28x28 digit rasters (``"0"``, ``"1"`` or ``"7"``)."""
    if name not in BUNDLED_DIGITS:
        raise ImageError(f"no bundled digit {name!r}; available: {', '.join(BUNDLED_DIGITS)}")
    with resources.as_file(resources.files("scatterkit") / "data" / f"digit{name}.pgm") as path:
        return read_pgm(path)


def write_pgm(path, pixels):
    pixels = np.asarray(pixels)
    if pixels.ndim != 2:
        raise ContractError("write_pgm expects a 2-D array")
    data = np.clip(np.rint(pixels), 0, 255).astype(np.uint8)
    h, w = data.shape
    with open(path, "wb") as fh:
        fh.write(b"P5\n%d %d\n255\n" % (w, h))
        fh.write(data.tobytes())


def contrast_to_pixels(grid, m, vmax):
    """Map ``|m|`` linearly from [0, vmax] to [0, 255] in display orientation."""
    img = np.abs(grid.to_image(m))  # axis 0 = x1, axis 1 = x2
    img = np.flipud(img.T)  # rows = x2 descending, cols = x1 ascending
    if vmax <= 0:
        return np.zeros_like(img)
    return np.clip(img / vmax, 0.0, 1.0) * 255.0
