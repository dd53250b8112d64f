"""
Reading and writing grayscale images.
Supported formats:
PGM - portable graymaps through Pillow, written as binary P5 files of 8 bit, or of 16 bit when the image
peak exceeds 255.
PNG - through Pillow, 8 or 16 bit like PGM.
RAWF64 - a text header line "RAWF64 <width> <height>" followed by the intensities as little-endian doubles,
row by row. Lossless.
"""
import os

import numpy as np
from PIL import Image as PillowImage

from typing import Optional

from gbm3d.core import Image, InvalidInputError

PGM = "pgm"
RAWF64 = "rawf64"
PNG = "png"

# File suffixes of every format
_SUFFIXES = {
    ".pgm": PGM,
    ".rawf64": RAWF64,
    ".f64": RAWF64,
    ".png": PNG,
}

# Pillow's format names of the formats it handles
_PILLOW_FORMATS = {
    PGM: "PPM",
    PNG: "PNG",
}

# Pillow modes of 16 bit grayscale images
_WIDE_MODES = ("I", "I;16", "I;16B", "I;16L")

_RAWF64_MAGIC = "RAWF64"
_NARROW_MAX_VALUE = 255
_WIDE_MAX_VALUE = 65535


def image_format(path: os.PathLike, fmt: Optional[str] = None) -> str:
    """
    :return: the given format, or the one the file suffix implies.
    """
    if fmt is None:
        fmt = _SUFFIXES.get(os.path.splitext(os.fspath(path))[1].lower())
    if fmt not in (PGM, RAWF64, PNG):
        raise InvalidInputError("unsupported image format for " + os.fspath(path))
    return fmt


def quantize(data: np.ndarray, max_value: int = _NARROW_MAX_VALUE) -> np.ndarray:
    """
    Rounds halves away from zero and clips to [0, max_value].
    """
    rounded = np.sign(data) * np.floor(np.abs(data) + 0.5)
    return np.clip(rounded, 0, max_value).astype(np.uint8 if max_value <= _NARROW_MAX_VALUE else np.uint16)


def _from_pillow(pillow_image: PillowImage.Image) -> Image:
    if pillow_image.mode in _WIDE_MODES:
        return Image(np.array(pillow_image, dtype=np.float64), peak=_WIDE_MAX_VALUE)
    return Image(np.array(pillow_image.convert("L"), dtype=np.float64), peak=_NARROW_MAX_VALUE)


def _to_pillow(img: Image) -> PillowImage.Image:
    if img.peak <= _NARROW_MAX_VALUE:
        return PillowImage.fromarray(quantize(img.data, _NARROW_MAX_VALUE))
    # 32 bit integers make Pillow's "I" mode, which both formats store as 16 bit
    return PillowImage.fromarray(quantize(img.data, _WIDE_MAX_VALUE).astype(np.int32))


def _read_rawf64(raw: bytes) -> Image:
    line_end = raw.find(b"\n")
    fields = raw[:line_end].decode("ascii", errors="replace").split() if line_end >= 0 else []
    if len(fields) != 3 or fields[0] != _RAWF64_MAGIC:
        raise InvalidInputError("not a RAWF64 file")
    try:
        width, height = int(fields[1]), int(fields[2])
    except ValueError:
        raise InvalidInputError("malformed RAWF64 header")
    if width < 0 or height < 0 or len(raw) - line_end - 1 != 8 * width * height:
        raise InvalidInputError("RAWF64 raster does not match its " + str(width) + "x" + str(height) + " header")
    data = np.frombuffer(raw, dtype="<f8", count=width * height, offset=line_end + 1)
    return Image(data.reshape(height, width))


def _write_rawf64(img: Image) -> bytes:
    header = _RAWF64_MAGIC + " " + str(img.width) + " " + str(img.height) + "\n"
    return header.encode("ascii") + img.data.astype("<f8").tobytes()


def read_image(path: os.PathLike, fmt: Optional[str] = None) -> Image:
    """
    Reads a grayscale image. The format is inferred from the file suffix unless given.
    8 bit images get peak 255, 16 bit ones peak 65535.
    """
    fmt = image_format(path, fmt)
    with open(path, "rb") as f:
        if fmt == RAWF64:
            return _read_rawf64(f.read())
        try:
            with PillowImage.open(f, formats=[_PILLOW_FORMATS[fmt]]) as pillow_image:
                pillow_image.load()
                return _from_pillow(pillow_image)
        except (OSError, SyntaxError, ValueError) as error:
            raise InvalidInputError("cannot read " + os.fspath(path) + " as " + fmt + ": " + str(error))


def write_image(path: os.PathLike, img: Image, fmt: Optional[str] = None):
    """
    Writes a grayscale image. PGM and PNG intensities are quantized, RAWF64 ones are stored exactly.
    """
    fmt = image_format(path, fmt)
    directory = os.path.dirname(os.fspath(path))
    if directory:
        os.makedirs(directory, exist_ok=True)
    if fmt == RAWF64:
        with open(path, "wb") as f:
            f.write(_write_rawf64(img))
        return
    _to_pillow(img).save(path, format=_PILLOW_FORMATS[fmt])
