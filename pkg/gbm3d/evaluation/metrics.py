import math

import numpy as np

from typing import NamedTuple, Union

from gbm3d.core import Image, InvalidInputError

ImageLike = Union[Image, np.ndarray]

# The PSNR peak, the largest 8-bit intensity
PSNR_PEAK = 255.0


def _as_array(img: ImageLike) -> np.ndarray:
    if isinstance(img, Image):
        return img.data
    return np.asarray(img, dtype=np.float64)


class NoiseSpec(NamedTuple):
    """
    The noise of one experiment: sigma is the noise deviation, derived from the SNR as mean(image) / snr.
    """
    snr: float
    sigma: float
    seed: int

    @classmethod
    def for_image(cls, img: ImageLike, snr: float, seed: int) -> "NoiseSpec":
        return cls(snr, sigma_for_snr(img, snr), seed)


def sigma_for_snr(img: ImageLike, snr: float) -> float:
    """
    :return: the noise deviation giving the image the signal to noise ratio mean(image) / sigma = snr.
    """
    if snr <= 0:
        raise InvalidInputError("snr must be positive, got " + str(snr))
    return float(np.mean(_as_array(img))) / snr


def add_gaussian_noise(img: Image, sigma: float, seed: int) -> Image:
    """
    :return: the image plus i.i.d. zero mean Gaussian noise, drawn from a generator seeded by `seed`.
    Intensities are not clipped.
    """
    if sigma < 0:
        raise InvalidInputError("sigma must not be negative, got " + str(sigma))
    if sigma == 0:
        return img
    rng = np.random.default_rng(seed)
    return img.with_data(img.data + rng.normal(0.0, sigma, size=img.shape))


def mse(reference: ImageLike, test: ImageLike) -> float:
    reference, test = _as_array(reference), _as_array(test)
    if reference.shape != test.shape:
        raise InvalidInputError("cannot compare a " + str(reference.shape) + " image to a " + str(test.shape) + " one")
    return float(np.mean((reference - test) ** 2))


def psnr(reference: ImageLike, test: ImageLike) -> float:
    """
    :return: the peak signal to noise ratio in decibels with a peak of 255, infinite for identical images.
    """
    error = mse(reference, test)
    if error == 0:
        return math.inf
    return 10 * math.log10(PSNR_PEAK ** 2 / error)
