"""
The first estimate: the matched blocks of every reference tile are stacked behind the noisy image into one
global volume, which is denoised by hard thresholding in a 3D wavelet domain, averaged over cyclic shifts.
The filtered blocks are aggregated back into an image with per-tile weights, and the whole procedure is
repeated over translations of the image that produce new reference tilings.
"""
import logging

import numpy as np

from typing import NamedTuple

from gbm3d.core import DenoiseParams, Image, InvalidInputError, TileGrid, crop_image, pad_image, parallel_map
from gbm3d.matching import MatchTable, build_match_table, gather_blocks
from gbm3d.transforms import FilterBank, analyze3d, hard_threshold, synthesize3d
from .aggregation import aggregate_blocks

logger = logging.getLogger(__name__)

# One positive weight per reference tile, shaped (rows, cols)
WeightField = np.ndarray

_VOLUME_AXES = (0, 1, 2)


class MatchedVolume(NamedTuple):
    """
    A (height, width, k) volume: slice z holds, at every tile, the tile's z-th match.
    Slice 0 is the image itself, since every tile is its own first match.
    """
    data: np.ndarray
    table: MatchTable


def blocks_to_volume(blocks: np.ndarray) -> np.ndarray:
    """
    :param blocks: shaped (rows, cols, k, n, n).
    :return: the (rows * n, cols * n, k) volume holding block (p, q, z) at (p * n, q * n, z).
    """
    rows, cols, k, n, _ = blocks.shape
    return blocks.transpose(0, 3, 1, 4, 2).reshape(rows * n, cols * n, k)


def volume_to_blocks(volume: np.ndarray, n: int) -> np.ndarray:
    """
    The inverse of blocks_to_volume.
    """
    height, width, k = volume.shape
    return volume.reshape(height // n, n, width // n, n, k).transpose(0, 2, 4, 1, 3)


def assemble_volume(img: Image, table: MatchTable, k: int) -> MatchedVolume:
    """
    Stacks the matches of every tile behind it. Slots without a true match already hold the reference block.
    """
    grid = table.grid
    if img.shape != (grid.padded_height, grid.padded_width) or table.k != k:
        raise InvalidInputError("a " + str(table) + " does not belong to a " + str(img))
    return MatchedVolume(blocks_to_volume(gather_blocks(img, table.positions, grid.tile)), table)


def filter_shifted(volume: np.ndarray, shift: int, params: DenoiseParams) -> np.ndarray:
    """
    Hard thresholds the volume in the wavelet domain after cyclically shifting it by `shift` along all three
    axes, and shifts the result back.
    """
    bank_xy = FilterBank.from_name(params.wavelet_xy)
    bank_z = FilterBank.from_name(params.wavelet_z)
    shifted = np.roll(volume, (shift,) * 3, axis=_VOLUME_AXES)
    pyr = hard_threshold(analyze3d(shifted, bank_xy, bank_z, params.levels), params.sigma,
                         params.threshold_base, params.threshold_slope)
    return np.roll(synthesize3d(pyr), (-shift,) * 3, axis=_VOLUME_AXES)


def filter_volume(vol: MatchedVolume, params: DenoiseParams) -> np.ndarray:
    """
    :return: the mean of the cycle-spun estimates of the volume, over params.spin_shifts().
    """
    estimates = [filter_shifted(vol.data, shift, params) for shift in params.spin_shifts()]
    return np.mean(estimates, axis=0)


def tv_weights(filtered: np.ndarray, grid: TileGrid, k: int, eps: float) -> WeightField:
    """
    Weighs every tile's filtered group by the inverse of its total variation: the sum of absolute forward
    differences along the three axes of the n x n x k group.
    """
    if filtered.shape != (grid.padded_height, grid.padded_width, k):
        raise InvalidInputError("a " + str(filtered.shape) + " volume is not aligned to " + str(grid))

    groups = volume_to_blocks(filtered, grid.tile)
    total_variation = sum(np.abs(np.diff(groups, axis=axis)).sum(axis=(2, 3, 4)) for axis in (2, 3, 4))
    return 1.0 / (total_variation + eps)


def uniform_weights(grid: TileGrid) -> WeightField:
    return np.ones((grid.rows, grid.cols))


def aggregate(filtered: np.ndarray, table: MatchTable, weights: WeightField) -> np.ndarray:
    """
    Scatters every filtered block to the position it was matched at. Pad-fill slots are left out.
    """
    grid = table.grid
    return aggregate_blocks(volume_to_blocks(filtered, grid.tile), table.positions, weights, table.valid_mask(),
                            (grid.padded_height, grid.padded_width))


def run_trial(padded: Image, shift: int, params: DenoiseParams) -> np.ndarray:
    """
    A single translation trial: match, assemble, filter, weigh and aggregate the image shifted cyclically by
    `shift` pixels along both axes, then shift the estimate back.
    """
    shifted = padded.with_data(np.roll(padded.data, (shift, shift), axis=(0, 1)))
    table = build_match_table(shifted, params, params.n1)
    filtered = filter_volume(assemble_volume(shifted, table, params.k), params)
    if params.weighting == "tv":
        weights = tv_weights(filtered, table.grid, params.k, params.eps_tv)
    else:
        weights = uniform_weights(table.grid)
    logger.debug("stage 1 trial with shift %d done on %d tiles", shift, len(table))
    return np.roll(aggregate(filtered, table, weights), (-shift, -shift), axis=(0, 1))


def stage1_denoise(img: Image, params: DenoiseParams, workers: int = 1) -> Image:
    """
    The first estimate of the image: the mean of the translation trials over params.trial_shifts(n1).
    :param workers: the trials are spread over this many processes; the result does not depend on it.
    """
    padded = pad_image(img, params.n1, params.levels)
    estimates = parallel_map(lambda shift: run_trial(padded, shift, params), params.trial_shifts(params.n1), workers)
    return crop_image(padded.with_data(np.mean(estimates, axis=0)), img.width, img.height)
