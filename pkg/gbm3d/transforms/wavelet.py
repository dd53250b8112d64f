"""
Separable multi-level 3D wavelet analysis and synthesis with periodic extension, and the
level-dependent hard thresholding of the detail subbands.
Volumes are indexed (row, column, slot): the first two axes use the spatial filter bank and the
last one the stacking-axis bank.
"""
import numpy as np
import pywt

from typing import Callable, Dict, List, NamedTuple, Tuple

from gbm3d.core import InvalidInputError

# The boundary extension used for every transform step
_MODE = 'periodization'

# The subband key of the approximation coefficients in pywt's n-dimensional transforms
_APPROXIMATION_KEY = 'aaa'

# Number of axes of a volume
_VOLUME_AXES = (0, 1, 2)


class FilterBank(NamedTuple):
    """
    The analysis and synthesis filters of a wavelet.
    """
    name: str
    analysis_lo: Tuple[float, ...]
    analysis_hi: Tuple[float, ...]
    synthesis_lo: Tuple[float, ...]
    synthesis_hi: Tuple[float, ...]

    @classmethod
    def from_name(cls, name: str) -> "FilterBank":
        """
        :return: the filter bank of the named wavelet (any name pywt knows, e.g. "bior1.5" or "haar").
        """
        try:
            wavelet = pywt.Wavelet(name)
        except ValueError:
            raise InvalidInputError("unknown wavelet: " + str(name))
        dec_lo, dec_hi, rec_lo, rec_hi = wavelet.filter_bank
        return cls(name, tuple(dec_lo), tuple(dec_hi), tuple(rec_lo), tuple(rec_hi))

    @property
    def wavelet(self) -> pywt.Wavelet:
        return pywt.Wavelet(self.name, filter_bank=(self.analysis_lo, self.analysis_hi,
                                                    self.synthesis_lo, self.synthesis_hi))


BIOR15 = FilterBank.from_name("bior1.5")
HAAR = FilterBank.from_name("haar")


class WaveletPyramid:
    """
    The multi-level 3D subbands of a volume.
    Some terminology:
    Level - 1 is the finest decomposition level, `levels` the coarsest.
    Details - for each level, the seven 3D subbands with at least one high-pass axis, keyed the way
    pywt keys them ('aad', 'ada', ..., 'ddd').
    Approximation - the low-pass volume left after the coarsest level.
    """
    Subbands = Dict[str, np.ndarray]

    def __init__(self, details: List[Subbands], approximation: np.ndarray, shape: Tuple[int, ...],
                 bank_xy: FilterBank, bank_z: FilterBank):
        """
        :param details: the detail subbands, finest level first.
        :param approximation: the coarsest approximation.
        :param shape: the shape of the analyzed volume.
        """
        self._details = details
        self._approximation = approximation
        self._shape = tuple(shape)
        self._bank_xy = bank_xy
        self._bank_z = bank_z

    @property
    def levels(self) -> int:
        return len(self._details)

    @property
    def details(self) -> List[Subbands]:
        return self._details

    @property
    def approximation(self) -> np.ndarray:
        return self._approximation

    @property
    def shape(self) -> Tuple[int, ...]:
        return self._shape

    @property
    def banks(self) -> Tuple[FilterBank, FilterBank]:
        return self._bank_xy, self._bank_z

    def coefficient_count(self) -> int:
        return self._approximation.size + sum(band.size for level in self._details for band in level.values())

    def map_details(self, func: Callable[[int, np.ndarray], np.ndarray]) -> "WaveletPyramid":
        """
        :param func: called with (level, subband), returns the new subband.
        :return: a new pyramid with transformed detail subbands and the same approximation.
        """
        details = [{key: func(level, band) for key, band in subbands.items()}
                   for level, subbands in enumerate(self._details, start=1)]
        return WaveletPyramid(details, self._approximation, self._shape, self._bank_xy, self._bank_z)


def _wavelets(bank_xy: FilterBank, bank_z: FilterBank) -> Tuple[pywt.Wavelet, pywt.Wavelet, pywt.Wavelet]:
    xy = bank_xy.wavelet
    return xy, xy, bank_z.wavelet


def analyze3d(vol: np.ndarray, bank_xy: FilterBank = BIOR15, bank_z: FilterBank = HAAR,
              levels: int = 3) -> WaveletPyramid:
    """
    Dyadic decomposition of the volume: every level filters and downsamples all three axes of the
    previous approximation.
    """
    vol = np.asarray(vol, dtype=np.float64)
    if vol.ndim != 3:
        raise InvalidInputError("expected a volume, got shape " + str(vol.shape))
    if levels < 0 or any(side % (1 << levels) for side in vol.shape):
        raise InvalidInputError("a " + str(vol.shape) + " volume does not admit " + str(levels) + " levels")

    wavelets = _wavelets(bank_xy, bank_z)
    approximation = vol
    details = []
    for _ in range(levels):
        subbands = pywt.dwtn(approximation, wavelets, mode=_MODE, axes=_VOLUME_AXES)
        approximation = subbands.pop(_APPROXIMATION_KEY)
        details.append(subbands)
    return WaveletPyramid(details, approximation, vol.shape, bank_xy, bank_z)


def synthesize3d(pyr: WaveletPyramid) -> np.ndarray:
    """
    :return: the volume whose analysis is the given pyramid.
    """
    wavelets = _wavelets(*pyr.banks)
    approximation = pyr.approximation
    for subbands in reversed(pyr.details):
        if any(band.shape != approximation.shape for band in subbands.values()):
            raise InvalidInputError("inconsistent subband shapes in wavelet pyramid")
        coeffs = dict(subbands)
        coeffs[_APPROXIMATION_KEY] = approximation
        approximation = pywt.idwtn(coeffs, wavelets, mode=_MODE, axes=_VOLUME_AXES)

    if approximation.shape != pyr.shape:
        raise InvalidInputError("wavelet pyramid synthesizes a " + str(approximation.shape) +
                                " volume, expected " + str(pyr.shape))
    return approximation


def level_threshold(sigma: float, level: int, base: float = 3.6, slope: float = 0.3) -> float:
    """
    :return: the hard threshold sigma * (base - slope * level), never negative.
    """
    return max(sigma * (base - slope * level), 0.0)


def hard_threshold(pyr: WaveletPyramid, sigma: float, base: float = 3.6, slope: float = 0.3) -> WaveletPyramid:
    """
    Zeroes the detail coefficients whose magnitude is below their level's threshold.
    Coefficients exactly at the threshold are kept; the approximation is never thresholded.
    """
    if sigma < 0:
        raise InvalidInputError("sigma must not be negative, got " + str(sigma))

    def threshold_band(level: int, band: np.ndarray) -> np.ndarray:
        return np.where(np.abs(band) >= level_threshold(sigma, level, base, slope), band, 0.0)

    return pyr.map_details(threshold_band)
