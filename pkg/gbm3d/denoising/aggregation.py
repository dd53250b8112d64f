import numpy as np

from typing import Tuple

from gbm3d.core import InternalError, InvalidInputError


def aggregate_blocks(blocks: np.ndarray, positions: np.ndarray, weights: np.ndarray, valid: np.ndarray,
                     shape: Tuple[int, int]) -> np.ndarray:
    """
    Scatters filtered blocks back to the positions they were matched at and normalizes by the accumulated weight.
    :param blocks: the filtered blocks, shaped (rows, cols, k, n, n).
    :param positions: the top left pixel of every block, shaped (rows, cols, k, 2).
    :param weights: one weight per group, shaped (rows, cols).
    :param valid: False for pad-fill slots, which take no part in the aggregation. Shaped (rows, cols, k).
    :param shape: the (height, width) of the output image.
    :return: the aggregated estimate.
    """
    if blocks.shape[:3] != positions.shape[:3] or blocks.shape[:3] != valid.shape or \
            blocks.shape[:2] != weights.shape:
        raise InvalidInputError("blocks, positions, weights and validity masks do not agree in shape")

    height, width = shape
    n = blocks.shape[-1]
    offsets = np.arange(n)
    rows = positions[..., 0, np.newaxis, np.newaxis] + offsets[:, np.newaxis]
    cols = positions[..., 1, np.newaxis, np.newaxis] + offsets[np.newaxis, :]
    pixels = np.broadcast_to(rows * width + cols, blocks.shape).ravel()
    slot_weights = np.broadcast_to((weights[..., np.newaxis] * valid)[..., np.newaxis, np.newaxis], blocks.shape)

    numerator = np.bincount(pixels, weights=(slot_weights * blocks).ravel(), minlength=height * width)
    denominator = np.bincount(pixels, weights=slot_weights.ravel(), minlength=height * width)
    if np.any(denominator <= 0):
        raise InternalError("aggregation left " + str(np.count_nonzero(denominator <= 0)) + " pixels without weight")
    return (numerator / denominator).reshape(shape)
