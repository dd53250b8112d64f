"""
The tests configuration file, contains the synthetic test images shared by all test suites.
"""

import pytest
import numpy as np

from gbm3d.core import Image, DenoiseParams
from gbm3d.evaluation import add_gaussian_noise, sigma_for_snr


def piecewise_smooth(size: int, seed: int = 0) -> np.ndarray:
    """
    A smooth background with a few flat disks and a vertical edge, intensities within [0, 255].
    """
    rng = np.random.default_rng(seed)
    rows, cols = np.mgrid[0:size, 0:size] / size
    img = 70 + 60 * rows + 30 * np.sin(2 * np.pi * cols)
    img[:, size // 2:] += 40
    for _ in range(4):
        center_row, center_col = rng.uniform(0.2, 0.8, size=2)
        radius = rng.uniform(0.08, 0.2)
        img[(rows - center_row) ** 2 + (cols - center_col) ** 2 < radius ** 2] = rng.uniform(20, 235)
    return np.clip(img, 0, 255)


@pytest.fixture(scope="session")
def make_image():
    def make(size: int, seed: int = 0) -> Image:
        return Image(piecewise_smooth(size, seed))
    return make


@pytest.fixture(scope="session")
def clean_image(make_image):
    return make_image(64)


@pytest.fixture(scope="session")
def noisy_pair(clean_image):
    # SNR 4: the noise deviation is a quarter of the mean intensity
    sigma = sigma_for_snr(clean_image, 4)
    return add_gaussian_noise(clean_image, sigma, seed=0), sigma


@pytest.fixture(scope="session")
def random_image():
    def make(height: int, width: int, seed: int = 0) -> Image:
        return Image(np.random.default_rng(seed).uniform(0, 255, size=(height, width)))
    return make


@pytest.fixture
def fast_params():
    # small groups for quick runs
    return DenoiseParams(k=8)
