"""Blockwise orthogonal DCT and spatial-to-frequency gradient transport.

An image is tiled into BxB blocks (replicate-padded on the bottom/right
when dimensions are not multiples of B) and each block is transformed
with the orthogonal type-II DCT matrix, per channel. Spectra are stored
as coefficient fields with the same layout as the padded image: entry
(i, j) of a block holds the (u, v) = (i % B, j % B) coefficient.

Loss gradients move to the DCT domain in two interchangeable ways: the
blockwise forward transform of the gradient field, and the explicit
vectorized Kronecker-product form. They agree because the basis is
orthogonal, and grad_to_freq is the exact adjoint of block_idct.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels

DEFAULT_BLOCK_SIZE = 8


def dct_basis(block_size):
    """Orthogonal DCT-II matrix D with constant row 0; D @ D.T == I.

    D[k, m] = a_k * cos((2m + 1) k pi / (2B)) with a_0 = sqrt(1/B) and
    a_k = sqrt(2/B) otherwise; row index k is frequency, column m is the
    sample position.
    """
    if block_size < 1:
        raise ValueError(f"block size must be >= 1, got {block_size}")
    b = block_size
    k = np.arange(b)[:, None]
    m = np.arange(b)[None, :]
    mat = np.sqrt(2.0 / b) * np.cos((2 * m + 1) * k * np.pi / (2 * b))
    mat[0, :] = np.sqrt(1.0 / b)
    return mat


@dataclass
class BlockSpectrum:
    """Blockwise DCT coefficients in field layout, padded dimensions."""

    coeffs: np.ndarray  # (Hp, Wp, C)
    block_size: int
    image_shape: tuple  # (H, W, C) before padding

    @property
    def blocks_y(self):
        return self.coeffs.shape[0] // self.block_size

    @property
    def blocks_x(self):
        return self.coeffs.shape[1] // self.block_size

    @property
    def channels(self):
        return self.coeffs.shape[2]

    def copy(self):
        return BlockSpectrum(self.coeffs.copy(), self.block_size, self.image_shape)


def _as_3d(img):
    img = np.asarray(img, dtype=np.float64)
    if img.ndim == 2:
        img = img[:, :, None]
    return img


def pad_to_blocks(img, block_size, mode="edge"):
    """Pad bottom/right so both spatial dimensions are multiples of block_size."""
    img = _as_3d(img)
    h, w = img.shape[:2]
    ph = (-h) % block_size
    pw = (-w) % block_size
    if ph == 0 and pw == 0:
        return img.copy()
    return np.pad(img, ((0, ph), (0, pw), (0, 0)), mode=mode)


def _transform(field, mat):
    out = np.empty_like(field)
    for c in range(field.shape[2]):
        out[:, :, c] = kernels.block_transform(field[:, :, c], mat)
    return out


def block_dct(img, basis):
    """Forward blockwise DCT of an image tensor, per channel."""
    img = _as_3d(img)
    padded = pad_to_blocks(img, basis.shape[0], mode="edge")
    return BlockSpectrum(_transform(padded, basis), basis.shape[0], img.shape)


def block_idct(spec, basis):
    """Inverse blockwise DCT; crops padding back to the original shape."""
    field = _transform(spec.coeffs, basis.T)
    h, w, _ = spec.image_shape
    return field[:h, :w, :]


def grad_to_freq(grad, basis):
    """Transport a spatial loss gradient to the DCT domain.

    Padded-region gradients are zero (the padding is discarded when
    spectra return to pixel space), so the gradient field is zero-padded
    before the forward transform. The result is the adjoint of
    block_idct applied to `grad`.
    """
    grad = _as_3d(grad)
    padded = pad_to_blocks(grad, basis.shape[0], mode="constant")
    return BlockSpectrum(_transform(padded, basis), basis.shape[0], grad.shape)


def grad_to_freq_kron(grad, basis):
    """Gradient transport via the explicit vectorized Kronecker form.

    For each block, vec(G) = vec(g)^T (D^T kron D^T) with column-major
    vectorization. Independent of grad_to_freq's blockwise route; the two
    must agree to float precision. Verification path, not the hot path.
    """
    grad = _as_3d(grad)
    b = basis.shape[0]
    padded = pad_to_blocks(grad, b, mode="constant")
    kron = np.kron(basis.T, basis.T)
    out = np.empty_like(padded)
    hp, wp, nc = padded.shape
    for c in range(nc):
        for bi in range(0, hp, b):
            for bj in range(0, wp, b):
                gvec = padded[bi : bi + b, bj : bj + b, c].flatten(order="F")
                gfreq = gvec @ kron
                out[bi : bi + b, bj : bj + b, c] = gfreq.reshape((b, b), order="F")
    return BlockSpectrum(out, b, grad.shape)
