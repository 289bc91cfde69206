"""Frequency-domain JND thresholds per block and DCT coefficient.

Two factors multiply: a contrast-sensitivity base threshold that grows
with radial frequency (high-frequency detail tolerates far more change),
and a contrast-masking elevation when a block's own coefficient is
already large. Thresholds are computed once, from the clean image.
"""

from dataclasses import dataclass

import numpy as np

from .dct import BlockSpectrum, block_dct

# Base-threshold parameterization: T(u,v) = (s / (phi_u phi_v)) *
# exp(c*w) / (a + b*w), with w the block-normalized radial frequency in
# cycles/pixel and phi the DCT normalization factors.
CSF_A = 1.33
CSF_B = 0.11
CSF_C = 11.0
CSF_S = 0.25
MASKING_EXPONENT = 0.6


@dataclass
class JndMapF:
    """Per-coefficient thresholds in the same field layout as BlockSpectrum."""

    thresholds: np.ndarray  # (Hp, Wp), single channel
    block_size: int
    image_shape: tuple  # (H, W) of the source grayscale image

    @property
    def blocks_y(self):
        return self.thresholds.shape[0] // self.block_size

    @property
    def blocks_x(self):
        return self.thresholds.shape[1] // self.block_size


def csf_base_threshold(basis):
    """BxB base thresholds from the contrast sensitivity function."""
    b = basis.shape[0]
    u = np.arange(b)[:, None]
    v = np.arange(b)[None, :]
    omega = np.sqrt(u**2 + v**2) / (2.0 * b)
    phi = np.full(b, np.sqrt(2.0 / b))
    phi[0] = np.sqrt(1.0 / b)
    norm = phi[:, None] * phi[None, :]
    return (CSF_S / norm) * np.exp(CSF_C * omega) / (CSF_A + CSF_B * omega)


def contrast_masking(coeff, base, dc=False):
    """Threshold elevation factor for a coefficient of the clean spectrum.

    AC coefficients: max(1, (|coeff| / base) ** MASKING_EXPONENT).
    The DC coefficient is never elevated (factor 1).
    """
    coeff = np.asarray(coeff, dtype=np.float64)
    if dc:
        return np.ones_like(coeff)
    return np.maximum(1.0, (np.abs(coeff) / base) ** MASKING_EXPONENT)


def frequency_jnd(img, basis):
    """Per-block, per-coefficient JND thresholds of a grayscale image.

    threshold(b, u, v) = T(u, v) * masking(X_b(u, v), T(u, v)), with the
    DC position held at its base threshold.
    """
    img = np.asarray(img, dtype=np.float64)
    b = basis.shape[0]
    if img.shape[0] < b or img.shape[1] < b:
        raise ValueError(f"image {img.shape} smaller than one {b}x{b} block")
    spec = block_dct(img, basis)
    coeffs = spec.coeffs[:, :, 0]
    base = np.tile(csf_base_threshold(basis), (spec.blocks_y, spec.blocks_x))
    factor = contrast_masking(coeffs, base)
    dc_mask = np.zeros((b, b), dtype=bool)
    dc_mask[0, 0] = True
    factor = np.where(np.tile(dc_mask, (spec.blocks_y, spec.blocks_x)), 1.0, factor)
    return JndMapF(base * factor, b, img.shape)


def spectrum_of(jnd_map):
    """View a JndMapF as a single-channel BlockSpectrum (for shared tooling)."""
    h, w = jnd_map.image_shape
    return BlockSpectrum(
        jnd_map.thresholds[:, :, None], jnd_map.block_size, (h, w, 1)
    )
