"""
FFT cross-correlation and the orthonormal 2D DCT.
All transforms act on the last two axes, so stacks of planes are transformed in one call.
"""
import numpy as np
import scipy.fft

from typing import Tuple

from gbm3d.core import InvalidInputError

# A 2D array of real values, rows first
RealPlane = np.ndarray

# The axes every plane transform acts on
_PLANE_AXES = (-2, -1)


def cross_correlate(g: RealPlane, f: RealPlane) -> RealPlane:
    """
    Cyclic cross-correlation of two equally sized planes:
    output[i, j] = sum over k, l of g[k, l] * f[(i + k) mod M, (j + l) mod M].
    Evaluated in the Fourier domain as the inverse transform of conj(F(g)) * F(f).
    :param g: the kernel, zero padded by the caller to the size of f.
    :param f: the plane to correlate against.
    """
    g = np.asarray(g, dtype=np.float64)
    f = np.asarray(f, dtype=np.float64)
    if g.shape != f.shape or g.ndim < 2:
        raise InvalidInputError("cannot correlate planes of shapes " + str(g.shape) + " and " + str(f.shape))

    plane_shape = f.shape[-2:]
    spectrum = np.conj(scipy.fft.rfft2(g, axes=_PLANE_AXES)) * scipy.fft.rfft2(f, axes=_PLANE_AXES)
    return scipy.fft.irfft2(spectrum, s=plane_shape, axes=_PLANE_AXES)


def _check_square(block: np.ndarray, axes: Tuple[int, int]):
    if block.ndim < 2 or block.shape[axes[0]] != block.shape[axes[1]]:
        raise InvalidInputError("the DCT needs square blocks, got shape " + str(block.shape))


def dct2_forward(block: RealPlane, axes: Tuple[int, int] = _PLANE_AXES) -> RealPlane:
    """
    :return: the orthonormal type-II DCT of the block along the given pair of axes.
    """
    block = np.asarray(block, dtype=np.float64)
    _check_square(block, axes)
    return scipy.fft.dctn(block, type=2, axes=axes, norm='ortho')


def dct2_inverse(coeffs: RealPlane, axes: Tuple[int, int] = _PLANE_AXES) -> RealPlane:
    """
    :return: the exact inverse of dct2_forward (an orthonormal type-III DCT).
    """
    coeffs = np.asarray(coeffs, dtype=np.float64)
    _check_square(coeffs, axes)
    return scipy.fft.idctn(coeffs, type=2, axes=axes, norm='ortho')
