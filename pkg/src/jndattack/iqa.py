"""Full-reference image quality metrics (PSNR, SSIM, 3-scale MS-SSIM).

Color inputs are reduced to BT.601 luma before scoring. SSIM follows
the standard 11x11 Gaussian-window formulation over valid window
positions; the multi-scale variant takes the contrast-structure term at
three dyadic scales and the luminance term at the coarsest, all with
uniform exponents 1/3 (negative terms are clamped at zero so the score
stays in [0, 1]).
"""

from dataclasses import dataclass

import numpy as np

from .imgproc import convolve2d, gaussian_kernel
from .tensor_io import to_grayscale

PSNR_CAP = 99.0
SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03
DYNAMIC_RANGE = 255.0
MS_SCALES = 3


@dataclass
class IqaScore:
    psnr: float
    ssim: float
    ms_ssim3: float  # nan when the images are too small for 3 scales


def _luma_pair(ref, test):
    ref = np.asarray(ref, dtype=np.float64)
    test = np.asarray(test, dtype=np.float64)
    if ref.shape != test.shape:
        raise ValueError(f"shape mismatch {ref.shape} vs {test.shape}")
    return to_grayscale(ref), to_grayscale(test)


def psnr(ref, test):
    """10*log10(255^2 / MSE) on luma, capped at 99 dB near identity."""
    a, b = _luma_pair(ref, test)
    mse = float(np.mean((a - b) ** 2))
    if mse < DYNAMIC_RANGE**2 * 10 ** (-PSNR_CAP / 10.0):
        return PSNR_CAP
    return float(10.0 * np.log10(DYNAMIC_RANGE**2 / mse))


def _window_stats(a, b, window):
    r = (SSIM_WINDOW - 1) // 2
    h, w = a.shape
    if h < SSIM_WINDOW or w < SSIM_WINDOW:
        raise ValueError(f"image {a.shape} smaller than the {SSIM_WINDOW}x{SSIM_WINDOW} window")

    def valid(img):
        # interior of a same-size replicate convolution == valid convolution
        return convolve2d(img, window)[r : h - r, r : w - r]

    mu_a = valid(a)
    mu_b = valid(b)
    var_a = valid(a * a) - mu_a**2
    var_b = valid(b * b) - mu_b**2
    cov = valid(a * b) - mu_a * mu_b
    return mu_a, mu_b, var_a, var_b, cov


def _luminance_term(mu_a, mu_b):
    c1 = (SSIM_K1 * DYNAMIC_RANGE) ** 2
    return (2.0 * mu_a * mu_b + c1) / (mu_a**2 + mu_b**2 + c1)


def _contrast_structure_term(var_a, var_b, cov):
    c2 = (SSIM_K2 * DYNAMIC_RANGE) ** 2
    return (2.0 * cov + c2) / (var_a + var_b + c2)


def ssim(ref, test):
    """Mean single-scale SSIM over valid window positions."""
    a, b = _luma_pair(ref, test)
    window = gaussian_kernel(SSIM_WINDOW, SSIM_SIGMA)
    mu_a, mu_b, var_a, var_b, cov = _window_stats(a, b, window)
    smap = _luminance_term(mu_a, mu_b) * _contrast_structure_term(var_a, var_b, cov)
    return float(np.mean(smap))


def _halve(img):
    h, w = img.shape
    return img[: 2 * (h // 2), : 2 * (w // 2)].reshape(h // 2, 2, w // 2, 2).mean(axis=(1, 3))


def ms_ssim3(ref, test):
    """Three-scale MS-SSIM with uniform 1/3 exponents."""
    a, b = _luma_pair(ref, test)
    min_dim = SSIM_WINDOW * 2 ** (MS_SCALES - 1)
    if min(a.shape) < min_dim:
        raise ValueError(f"image {a.shape} too small for {MS_SCALES} scales (need >= {min_dim})")
    window = gaussian_kernel(SSIM_WINDOW, SSIM_SIGMA)
    value = 1.0
    for scale in range(MS_SCALES):
        mu_a, mu_b, var_a, var_b, cov = _window_stats(a, b, window)
        cs = max(float(np.mean(_contrast_structure_term(var_a, var_b, cov))), 0.0)
        value *= cs ** (1.0 / MS_SCALES)
        if scale == MS_SCALES - 1:
            lum = max(float(np.mean(_luminance_term(mu_a, mu_b))), 0.0)
            value *= lum ** (1.0 / MS_SCALES)
        else:
            a = _halve(a)
            b = _halve(b)
    return value


def score_pair(ref, test):
    """All metrics at once; MS-SSIM falls back to nan when not computable."""
    ref3 = np.asarray(ref)
    min_dim = min(ref3.shape[:2])
    ms = ms_ssim3(ref, test) if min_dim >= SSIM_WINDOW * 2 ** (MS_SCALES - 1) else float("nan")
    return IqaScore(psnr=psnr(ref, test), ssim=ssim(ref, test), ms_ssim3=ms)
