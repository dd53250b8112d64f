from .spectral import RealPlane, cross_correlate, dct2_forward, dct2_inverse
from .wavelet import FilterBank, WaveletPyramid, BIOR15, HAAR, analyze3d, synthesize3d, hard_threshold, \
    level_threshold
