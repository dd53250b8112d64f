from typing import Iterator, NamedTuple

import numpy as np

from .errors import InvalidInputError
from .image import Image


class TileGrid(NamedTuple):
    """
    Non-overlapping reference blocks that tile a padded image.
    Tile (p, q) has its top left pixel at (p * tile, q * tile); p counts rows and q counts columns.
    """
    tile: int
    cols: int
    rows: int
    padded_width: int
    padded_height: int

    def __len__(self) -> int:
        return self.rows * self.cols

    def positions(self) -> Iterator[Image.Position]:
        """
        :return: an iterator on the top left pixels of all tiles, in raster order.
        """
        for p in range(self.rows):
            for q in range(self.cols):
                yield p * self.tile, q * self.tile

    def position_array(self) -> np.ndarray:
        """
        :return: an int array shaped (rows, cols, 2) of the tiles' top left pixels.
        """
        rows, cols = np.meshgrid(np.arange(self.rows), np.arange(self.cols), indexing='ij')
        return np.stack([rows, cols], axis=-1) * self.tile


def tile_grid(width: int, height: int, n: int) -> TileGrid:
    """
    :return: the grid of n x n reference blocks tiling a width x height image.
    """
    if n < 1 or width < n or height < n or width % n or height % n:
        raise InvalidInputError("a " + str(width) + "x" + str(height) + " image cannot be tiled by " +
                                str(n) + "x" + str(n) + " blocks, pad it first")
    return TileGrid(tile=n, cols=width // n, rows=height // n, padded_width=width, padded_height=height)
