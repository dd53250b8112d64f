"""
The second estimate: blocks are matched again on the first estimate, and the groups of the noisy image are
shrunk by an empirical Wiener filter whose coefficients come from the groups of the first estimate.
All groups of a tiling are filtered together as one (n, n, k, rows, cols) stack.
"""
import logging

import numpy as np
import pywt

from typing import List, NamedTuple, Tuple

from gbm3d.core import DenoiseParams, Image, InvalidInputError, crop_image, pad_image, parallel_map
from gbm3d.matching import MatchTable, build_match_table, gather_blocks
from gbm3d.transforms import HAAR, dct2_forward, dct2_inverse
from .aggregation import aggregate_blocks

logger = logging.getLogger(__name__)

_MODE = 'periodization'

# Axes of a group stack
_BLOCK_AXES = (0, 1)
_STACK_AXIS = 2
_GROUP_AXES = (0, 1, 2)

# Shrinkage energies below this are treated as this, keeping the Wiener weights finite
_MIN_SHRINKAGE_ENERGY = 1e-12


class GroupStack(NamedTuple):
    """
    The matched groups of a tiling, gathered at identical positions from the noisy image and from the first
    estimate. Both stacks are shaped (n, n, k, rows, cols): group (p, q) is stack[..., p, q].
    """
    noisy: np.ndarray
    basic: np.ndarray
    table: MatchTable


class WienerEstimate(NamedTuple):
    """
    The filtered groups, shaped as the stacks they came from, and one aggregation weight per group.
    """
    groups: np.ndarray
    weights: np.ndarray


def _as_stack(blocks: np.ndarray) -> np.ndarray:
    # (rows, cols, k, n, n) -> (n, n, k, rows, cols)
    return blocks.transpose(3, 4, 2, 0, 1)


def _as_blocks(stack: np.ndarray) -> np.ndarray:
    return stack.transpose(3, 4, 2, 0, 1)


def build_group_stack(noisy: Image, basic: Image, params: DenoiseParams) -> GroupStack:
    """
    Matches n2 x n2 blocks on the first estimate and gathers the matched groups from both images.
    """
    if noisy.shape != basic.shape:
        raise InvalidInputError("noisy " + str(noisy) + " and first estimate " + str(basic) + " differ in size")
    table = build_match_table(basic, params, params.n2)
    n = params.n2
    return GroupStack(_as_stack(gather_blocks(noisy, table.positions, n)),
                      _as_stack(gather_blocks(basic, table.positions, n)), table)


def _haar_forward(groups: np.ndarray) -> Tuple[np.ndarray, List[int]]:
    coeffs = pywt.wavedec(groups, HAAR.wavelet, mode=_MODE, axis=_STACK_AXIS)
    return np.concatenate(coeffs, axis=_STACK_AXIS), [band.shape[_STACK_AXIS] for band in coeffs]


def _haar_inverse(coeffs: np.ndarray, sizes: List[int]) -> np.ndarray:
    bands = np.split(coeffs, np.cumsum(sizes)[:-1], axis=_STACK_AXIS)
    return pywt.waverec(bands, HAAR.wavelet, mode=_MODE, axis=_STACK_AXIS)


def _shrinkage(spectrum_basic: np.ndarray, sigma: float) -> np.ndarray:
    power = spectrum_basic ** 2
    denominator = power + sigma ** 2
    return np.divide(power, denominator, out=np.zeros_like(power), where=denominator > 0)


def _wiener_weight(shrinkage_energy, sigma: float):
    if sigma == 0:
        return np.ones_like(shrinkage_energy)
    return 1.0 / (sigma ** 2 * np.maximum(shrinkage_energy, _MIN_SHRINKAGE_ENERGY))


def wiener_filter_groups(stack: GroupStack, sigma: float) -> WienerEstimate:
    """
    Transforms every group with a 2D DCT of its blocks followed by a full depth Haar transform along the
    stacking axis, shrinks the noisy spectrum by W = B^2 / (B^2 + sigma^2) where B is the spectrum of the first
    estimate, and transforms back. Each group is weighted by 1 / (sigma^2 |W|^2).
    """
    if sigma < 0:
        raise InvalidInputError("sigma must not be negative, got " + str(sigma))

    spectrum_basic, _ = _haar_forward(dct2_forward(stack.basic, axes=_BLOCK_AXES))
    spectrum_noisy, sizes = _haar_forward(dct2_forward(stack.noisy, axes=_BLOCK_AXES))
    shrinkage = _shrinkage(spectrum_basic, sigma)

    groups = dct2_inverse(_haar_inverse(shrinkage * spectrum_noisy, sizes), axes=_BLOCK_AXES)
    weights = _wiener_weight(np.sum(shrinkage ** 2, axis=_GROUP_AXES), sigma)
    return WienerEstimate(groups, weights)


def wiener_filter_group(noisy_group: np.ndarray, basic_group: np.ndarray, sigma: float) -> Tuple[np.ndarray, float]:
    """
    The Wiener filtering of a single (n, n, k) group, one block and one stacking line at a time.
    :return: the filtered group and its aggregation weight.
    """
    n, _, k = noisy_group.shape

    def transform(group: np.ndarray) -> np.ndarray:
        spectrum = np.stack([dct2_forward(group[:, :, z]) for z in range(k)], axis=-1)
        for i in range(n):
            for j in range(n):
                spectrum[i, j] = np.concatenate(pywt.wavedec(spectrum[i, j], HAAR.wavelet, mode=_MODE))
        return spectrum

    def inverse(spectrum: np.ndarray) -> np.ndarray:
        group = np.empty_like(spectrum)
        sizes = [band.shape[0] for band in pywt.wavedec(np.zeros(k), HAAR.wavelet, mode=_MODE)]
        for i in range(n):
            for j in range(n):
                bands = np.split(spectrum[i, j], np.cumsum(sizes)[:-1])
                group[i, j] = pywt.waverec(bands, HAAR.wavelet, mode=_MODE)
        return np.stack([dct2_inverse(group[:, :, z]) for z in range(k)], axis=-1)

    shrinkage = _shrinkage(transform(basic_group), sigma)
    filtered = inverse(shrinkage * transform(noisy_group))
    return filtered, float(_wiener_weight(np.sum(shrinkage ** 2), sigma))


def run_wiener_trial(noisy: Image, basic: Image, shift: int, params: DenoiseParams) -> np.ndarray:
    """
    A single translation trial of the second estimate on padded images.
    """
    def shifted(img: Image) -> Image:
        return img.with_data(np.roll(img.data, (shift, shift), axis=(0, 1)))

    stack = build_group_stack(shifted(noisy), shifted(basic), params)
    estimate = wiener_filter_groups(stack, params.sigma)
    grid = stack.table.grid
    aggregated = aggregate_blocks(_as_blocks(estimate.groups), stack.table.positions, estimate.weights,
                                  stack.table.valid_mask(), (grid.padded_height, grid.padded_width))
    logger.debug("stage 2 trial with shift %d done on %d tiles", shift, len(grid))
    return np.roll(aggregated, (-shift, -shift), axis=(0, 1))


def stage2_denoise(noisy: Image, basic: Image, params: DenoiseParams, workers: int = 1) -> Image:
    """
    The second estimate of the noisy image given a first estimate: the mean of the Wiener translation trials
    over params.trial_shifts(n2).
    The trials follow the first estimate's schedule relative to the block size, so with the default blocks the
    shifts are 0, 2, 4 here against 0, 4, 8 in the first estimate.
    """
    if noisy.shape != basic.shape:
        raise InvalidInputError("noisy " + str(noisy) + " and first estimate " + str(basic) + " differ in size")
    padded_noisy = pad_image(noisy, params.n2, 0)
    padded_basic = pad_image(basic, params.n2, 0)
    estimates = parallel_map(lambda shift: run_wiener_trial(padded_noisy, padded_basic, shift, params),
                             params.trial_shifts(params.n2), workers)
    return crop_image(padded_noisy.with_data(np.mean(estimates, axis=0)), noisy.width, noisy.height)
