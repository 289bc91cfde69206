"""Spatial just-noticeable-difference map.

The per-pixel visibility threshold combines texture masking (busy
regions hide more distortion) and luminance adaptation (Weber-law
dependence on local background brightness), with an overlap correction
between the two. Edges are structurally salient, so a low weight is
assigned on Canny edge pixels before smoothing; plain texture keeps its
full budget.
"""

import numpy as np

from .imgproc import canny, convolve2d, directional_filter_bank, gaussian_kernel

OVERLAP_C = 0.3
EDGE_WEIGHT = 0.1
CANNY_SIGMA = 1.0
CANNY_LOW = 0.1
CANNY_HIGH = 0.3

_BOX5 = np.ones((5, 5))
_FILTER_BANK = directional_filter_bank()


def _edge_smoother():
    return gaussian_kernel(3, 0.5)


def texture_masking(img):
    """Texture masking map: max oriented high-pass response, edge-protected.

    The maximum absolute response over the four oriented filters is
    scaled by a smoothed weight map that is EDGE_WEIGHT on Canny edge
    pixels and 1 elsewhere.
    """
    img = np.asarray(img, dtype=np.float64)
    resp = np.max(
        np.stack([np.abs(convolve2d(img, h)) for h in _FILTER_BANK]), axis=0
    )
    edges = canny(img, sigma=CANNY_SIGMA, low=CANNY_LOW, high=CANNY_HIGH)
    weight = np.where(edges == 1, EDGE_WEIGHT, 1.0)
    return resp * convolve2d(weight, _edge_smoother())


def adaptation_curve(bg):
    """Weber-law visibility threshold at background luminance `bg`.

    Falls from 17 at black with the square root of relative luminance,
    reaches 0 at 127, then rises linearly to 6 at 255.
    """
    bg = np.asarray(bg, dtype=np.float64)
    dark = 17.0 * (1.0 - np.sqrt(bg / 127.0))
    bright = 3.0 * (bg - 127.0) / 128.0 + 3.0
    return np.where(bg <= 127.0, dark, bright)


def luminance_adaptation(img):
    """Adaptation thresholds from the 5x5 local mean luminance."""
    img = np.asarray(img, dtype=np.float64)
    # summed box filter divided once: exact for integer-valued flats
    bg = convolve2d(img, _BOX5) / 25.0
    return adaptation_curve(bg)


def spatial_jnd(img):
    """Per-pixel spatial JND: TM + LA - C * min(TM, LA)."""
    tm = texture_masking(img)
    la = luminance_adaptation(img)
    return tm + la - OVERLAP_C * np.minimum(tm, la)
