from .errors import DenoisingError, InvalidInputError, InternalError
from .image import Image, pad_image, crop_image, padded_size
from .grid import TileGrid, tile_grid
from .params import DenoiseParams
from .parallel import parallel_map
