"""
Block matching through cross-correlations.
The squared distance between two blocks expands as |f - g|^2 = |f|^2 + |g|^2 - 2<f, g>: the squared norms
of all blocks come from one correlation of the squared image with a block of ones, and the inner products
of a reference block with all its candidates come from one correlation of the reference block with the
search region.
"""
import logging

import numpy as np

from typing import List, NamedTuple, Optional, Tuple, Union

from gbm3d.core import DenoiseParams, Image, InvalidInputError, TileGrid, parallel_map, tile_grid
from gbm3d.transforms import cross_correlate

logger = logging.getLogger(__name__)

# Entry (i, j) holds the squared norm of the block whose top left pixel is (i, j)
BlockNormImage = np.ndarray

ImageLike = Union[Image, np.ndarray]

# The available distance computations
FFT_METHOD = "fft"
NAIVE_METHOD = "naive"


def _as_array(img: ImageLike) -> np.ndarray:
    if isinstance(img, Image):
        return img.data
    return np.asarray(img, dtype=np.float64)


class DistanceMap(NamedTuple):
    """
    The distances of a reference block to every candidate in its search window.
    distances[i, j] belongs to the candidate whose top left pixel is origin + (i, j).
    """
    origin: Image.Position
    distances: np.ndarray


class Matches(NamedTuple):
    """
    The matches of a single reference block, closest first.
    positions is shaped (k, 2); entries from `count` on are pad-fill copies of the reference.
    """
    positions: np.ndarray
    distances: np.ndarray
    count: int


def block_norms(img: ImageLike, n: int) -> BlockNormImage:
    """
    :return: the squared l2 norm of the cyclically indexed n x n block at every position of the image.
    """
    data = _as_array(img)
    if n < 1 or n > min(data.shape):
        raise InvalidInputError("block side " + str(n) + " does not fit a " + str(data.shape) + " image")

    ones = np.zeros_like(data)
    ones[:n, :n] = 1.0
    return np.maximum(cross_correlate(ones, data ** 2), 0.0)


def candidate_bounds(shape: Tuple[int, int], ref_pos: Image.Position, n: int, window: int,
                     global_search: bool = False) -> Tuple[int, int, int, int]:
    """
    The candidate top left pixels form a window x window square centered on the reference's top left pixel,
    clipped so every candidate block lies inside the image.
    :return: the inclusive bounds (first row, last row, first column, last column) of the candidates.
    """
    height, width = shape
    row, col = ref_pos
    if not (0 <= row <= height - n and 0 <= col <= width - n):
        raise InvalidInputError("reference block at " + str(ref_pos) + " is not inside the image")
    if global_search:
        return 0, height - n, 0, width - n

    half = window // 2
    return (max(row - half, 0), min(row + window - half - 1, height - n),
            max(col - half, 0), min(col + window - half - 1, width - n))


def distance_map(img: ImageLike, norms: BlockNormImage, ref_pos: Image.Position, n: int, window: int,
                 global_search: bool = False) -> DistanceMap:
    """
    Computes the distances of the reference block to all its candidates with a single cross-correlation
    of the reference block against the search region.
    :param norms: the block norms of img, see block_norms.
    """
    data = _as_array(img)
    first_row, last_row, first_col, last_col = candidate_bounds(data.shape, ref_pos, n, window, global_search)
    row, col = ref_pos

    region = data[first_row:last_row + n, first_col:last_col + n]
    kernel = np.zeros_like(region)
    kernel[:n, :n] = data[row:row + n, col:col + n]
    inner_products = cross_correlate(kernel, region)[:last_row - first_row + 1, :last_col - first_col + 1]

    distances = norms[first_row:last_row + 1, first_col:last_col + 1] + norms[row, col] - 2.0 * inner_products
    distances = np.maximum(distances, 0.0)
    distances[row - first_row, col - first_col] = 0.0
    return DistanceMap((first_row, first_col), distances)


def naive_distance_map(img: ImageLike, ref_pos: Image.Position, n: int, window: int,
                       global_search: bool = False) -> DistanceMap:
    """
    Computes the same distances as distance_map by subtracting the reference block from every candidate.
    """
    data = _as_array(img)
    first_row, last_row, first_col, last_col = candidate_bounds(data.shape, ref_pos, n, window, global_search)
    row, col = ref_pos
    reference = data[row:row + n, col:col + n]

    distances = np.empty((last_row - first_row + 1, last_col - first_col + 1))
    for i, cur_row in enumerate(range(first_row, last_row + 1)):
        for j, cur_col in enumerate(range(first_col, last_col + 1)):
            distances[i, j] = np.sum((data[cur_row:cur_row + n, cur_col:cur_col + n] - reference) ** 2)
    return DistanceMap((first_row, first_col), distances)


def top_k(dmap: DistanceMap, reference: Image.Position, k: int, tau_match: Optional[float] = None,
          min_matches: int = 1) -> Matches:
    """
    Selects the k closest candidates. The reference itself always comes first; the others follow by
    ascending distance, ties broken by raster order. Missing matches are filled with the reference.
    :param tau_match: if given, candidates at or above this distance are not matched unless needed
    to reach min_matches.
    """
    if k < 1:
        raise InvalidInputError("k must be positive, got " + str(k))

    height, width = dmap.distances.shape
    ref_row, ref_col = reference[0] - dmap.origin[0], reference[1] - dmap.origin[1]
    if not (0 <= ref_row < height and 0 <= ref_col < width):
        raise InvalidInputError("reference " + str(reference) + " is not a candidate of the distance map")
    distances = dmap.distances.ravel()
    ref_index = ref_row * width + ref_col

    # lexsort's last key is the primary one
    order = np.lexsort((np.arange(distances.size), distances))
    order = order[order != ref_index]
    if tau_match is not None:
        kept = distances[order] < tau_match
        kept[:min_matches - 1] = True
        order = order[kept]
    order = np.concatenate([[ref_index], order[:k - 1]]).astype(np.int64)
    count = len(order)

    positions = np.empty((k, 2), dtype=np.int64)
    positions[:] = reference
    positions[:count, 0] = dmap.origin[0] + order // width
    positions[:count, 1] = dmap.origin[1] + order % width

    match_distances = np.zeros(k)
    match_distances[1:count] = distances[order[1:]]
    return Matches(positions, match_distances, count)


class MatchTable:
    """
    The matches of every reference block of a tiling.
    """

    def __init__(self, grid: TileGrid, k: int, positions: np.ndarray, distances: np.ndarray, counts: np.ndarray):
        """
        :param positions: an int array shaped (rows, cols, k, 2) of matched top left pixels.
        :param distances: shaped (rows, cols, k), ascending along the last axis.
        :param counts: shaped (rows, cols), the number of true matches of each tile (pad-fill excluded).
        """
        self._grid = grid
        self._k = k
        self._positions = positions
        self._distances = distances
        self._counts = counts
        for array in (positions, distances, counts):
            array.setflags(write=False)

    @property
    def grid(self) -> TileGrid:
        return self._grid

    @property
    def k(self) -> int:
        return self._k

    @property
    def positions(self) -> np.ndarray:
        return self._positions

    @property
    def distances(self) -> np.ndarray:
        return self._distances

    @property
    def counts(self) -> np.ndarray:
        return self._counts

    def __getitem__(self, tile: Tuple[int, int]) -> Matches:
        p, q = tile
        return Matches(self._positions[p, q], self._distances[p, q], int(self._counts[p, q]))

    def __len__(self) -> int:
        return len(self._grid)

    def valid_mask(self) -> np.ndarray:
        """
        :return: a bool array shaped (rows, cols, k), True for true matches and False for pad-fill slots.
        """
        return np.arange(self._k) < self._counts[..., np.newaxis]

    def __str__(self) -> str:
        return "MatchTable: " + str(self._grid.rows) + "x" + str(self._grid.cols) + " tiles of side " + \
               str(self._grid.tile) + ", k: " + str(self._k)


def gather_blocks(img: ImageLike, positions: np.ndarray, n: int) -> np.ndarray:
    """
    :param positions: an int array of top left pixels shaped (..., 2).
    :return: the n x n blocks at the given positions, shaped (..., n, n).
    """
    data = _as_array(img)
    offsets = np.arange(n)
    rows = positions[..., 0, np.newaxis, np.newaxis] + offsets[:, np.newaxis]
    cols = positions[..., 1, np.newaxis, np.newaxis] + offsets[np.newaxis, :]
    return data[rows, cols]


def build_match_table(img: ImageLike, params: DenoiseParams, n: int, method: str = FFT_METHOD,
                      workers: int = 1) -> MatchTable:
    """
    Matches every reference block of the n x n tiling of a padded image.
    :param method: FFT_METHOD for the correlation path, NAIVE_METHOD for direct subtraction.
    :param workers: the number of processes the tile rows are spread over; the table does not depend on it.
    """
    if method not in (FFT_METHOD, NAIVE_METHOD):
        raise InvalidInputError("unknown matching method: " + str(method))

    # distances do not change when a constant is removed, and the correlations lose less precision
    data = _as_array(img)
    data = data - data.mean()
    grid = tile_grid(data.shape[1], data.shape[0], n)
    k = params.k
    norms = block_norms(data, n) if method == FFT_METHOD else None

    def match_row(p: int) -> List[Matches]:
        row_matches = []
        for q in range(grid.cols):
            ref_pos = (p * n, q * n)
            if method == FFT_METHOD:
                dmap = distance_map(data, norms, ref_pos, n, params.window, params.global_search)
            else:
                dmap = naive_distance_map(data, ref_pos, n, params.window, params.global_search)
            row_matches.append(top_k(dmap, ref_pos, k, params.tau_match, params.min_matches))
        return row_matches

    rows = parallel_map(match_row, range(grid.rows), workers)
    logger.debug("matched %d tiles of side %d with the %s method", len(grid), n, method)

    positions = np.array([[matches.positions for matches in row] for row in rows], dtype=np.int64)
    distances = np.array([[matches.distances for matches in row] for row in rows])
    counts = np.array([[matches.count for matches in row] for row in rows], dtype=np.int64)
    return MatchTable(grid, k, positions, distances, counts)
