"""
Two-stage block matching denoising of grayscale images: a global wavelet hard thresholding estimate
followed by an empirical Wiener estimate, both built on fast correlation based block matching.
"""
from gbm3d.core import Image, DenoiseParams, DenoisingError, InvalidInputError, InternalError
from gbm3d.denoising import Denoiser, denoise
