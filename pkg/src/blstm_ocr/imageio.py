"""8-bit grayscale image files: binary PGM (P5) and PNG.

Images are ``uint8`` arrays of shape ``(height, width)``, 0 = ink, 255 = paper.
"""

from pathlib import Path

import numpy as np
from PIL import Image

from .exceptions import ImageFormatError


def _read_pgm(data):
    # header tokens: magic, width, height, maxval; '#' comments allowed
    tokens = []
    pos = 0
    while len(tokens) < 4:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ImageFormatError("truncated PGM header")
        tokens.append(data[start:pos])
    pos += 1  # single whitespace before the raster
    if tokens[0] != b"P5":
        raise ImageFormatError(f"unsupported PNM type {tokens[0]!r}; convert to 8-bit grayscale P5")
    width, height, maxval = (int(t) for t in tokens[1:])
    if maxval != 255:
        raise ImageFormatError(f"PGM maxval {maxval} unsupported; expected 8-bit (255)")
    raster = np.frombuffer(data, dtype=np.uint8, count=width * height, offset=pos)
    return raster.reshape(height, width).copy()


def read_image(path):
    """Load an 8-bit grayscale PGM or PNG.  Colour images are rejected."""
    path = Path(path)
    data = path.read_bytes()
    if data[:2] in (b"P5", b"P2", b"P3", b"P6"):
        if data[:2] != b"P5":
            raise ImageFormatError(
                f"{path}: only binary 8-bit PGM (P5) is supported; convert with e.g. "
                "`convert in.ppm -colorspace Gray -depth 8 out.pgm`"
            )
        try:
            return _read_pgm(data)
        except ValueError as exc:
            raise ImageFormatError(f"{path}: {exc}") from exc
    try:
        with Image.open(path) as im:
            im.load()
            if im.format != "PNG":
                raise ImageFormatError(f"{path}: unsupported format {im.format}")
            if im.mode != "L":
                raise ImageFormatError(
                    f"{path}: expected 8-bit grayscale, got mode {im.mode}; "
                    "convert first, e.g. `convert in.png -colorspace Gray -depth 8 out.png`"
                )
            return np.asarray(im, dtype=np.uint8).copy()
    except OSError as exc:
        raise ImageFormatError(f"{path}: {exc}") from exc


def write_pgm(path, image):
    image = np.ascontiguousarray(image, dtype=np.uint8)
    h, w = image.shape
    with open(path, "wb") as fh:
        fh.write(b"P5\n%d %d\n255\n" % (w, h))
        fh.write(image.tobytes())


def write_image(path, image):
    path = Path(path)
    if path.suffix.lower() == ".png":
        Image.fromarray(np.asarray(image, dtype=np.uint8), mode="L").save(path)
    else:
        write_pgm(path, image)
