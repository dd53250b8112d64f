import math

import numpy as np

from typing import Tuple

from .errors import InvalidInputError


class Image:
    """
    A grayscale image: a 2D grid of real (double precision) intensities.
    Some terminology:
    Peak - the maximal representable intensity of the image source, e.g. 255 for 8-bit sources.
    Position - a (row, column) pair, the top left pixel of a block.
    """
    Position = Tuple[int, int]
    Intensity = float

    # The peak of 8-bit sources
    DEFAULT_PEAK = 255.0

    def __init__(self, data, peak: Intensity = DEFAULT_PEAK):
        """
        Initializes the image.
        :param data: a 2D array-like of intensities, rows first.
        :param peak: the maximal representable intensity.
        """
        data = np.array(data, dtype=np.float64)
        if data.ndim != 2:
            raise InvalidInputError("an image must be two dimensional, got shape " + str(data.shape))
        if not np.all(np.isfinite(data)):
            raise InvalidInputError("image intensities must be finite")
        if peak <= 0:
            raise InvalidInputError("image peak must be positive, got " + str(peak))

        data.setflags(write=False)
        self._data = data
        self._peak = float(peak)

    @property
    def data(self) -> np.ndarray:
        """
        :return: a read-only view of the intensities, shaped (height, width).
        """
        return self._data

    @property
    def width(self) -> int:
        return self._data.shape[1]

    @property
    def height(self) -> int:
        return self._data.shape[0]

    @property
    def peak(self) -> Intensity:
        return self._peak

    @property
    def shape(self) -> Tuple[int, int]:
        return self._data.shape

    def __len__(self) -> int:
        return self._data.size

    def with_data(self, data) -> "Image":
        """
        :return: a new image with the given intensities and this image's peak.
        """
        return Image(data, self._peak)

    def __str__(self) -> str:
        return "Image: " + str(self.width) + "x" + str(self.height) + ", peak: " + str(self._peak)


def padded_size(size: int, n: int, levels: int) -> int:
    """
    :return: the smallest multiple of lcm(n, 2^levels) that is at least size.
    """
    multiple = n * (1 << levels) // math.gcd(n, 1 << levels)
    return -(-size // multiple) * multiple


def pad_image(img: Image, n: int, levels: int) -> Image:
    """
    Pads the image on its bottom and right borders so that both dimensions become multiples of
    the block side and of 2^levels. The added border replicates the edge rows and columns.
    :param img: the image to pad.
    :param n: the block side.
    :param levels: the number of dyadic levels the padded image must admit.
    :return: the padded image; the original pixels are the top left region.
    """
    if n < 1 or levels < 0:
        raise InvalidInputError("invalid padding geometry: n=" + str(n) + ", levels=" + str(levels))
    if img.width == 0 or img.height == 0:
        raise InvalidInputError("cannot pad a zero-sized image")

    height = padded_size(img.height, n, levels)
    width = padded_size(img.width, n, levels)
    if (height, width) == img.shape:
        return img
    return img.with_data(np.pad(img.data, ((0, height - img.height), (0, width - img.width)), mode='edge'))


def crop_image(img: Image, width: int, height: int) -> Image:
    """
    :return: the top left width x height region of the image.
    """
    if width > img.width or height > img.height or width < 0 or height < 0:
        raise InvalidInputError("cannot crop a " + str(img.width) + "x" + str(img.height) +
                                " image to " + str(width) + "x" + str(height))
    if (height, width) == img.shape:
        return img
    return img.with_data(img.data[:height, :width])
