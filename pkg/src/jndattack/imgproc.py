"""Image-processing primitives feeding the spatial JND model.

Convolution here is true convolution (the kernel is flipped); the
oriented high-pass filters are antisymmetric, so this orientation is
pinned by tests against a direct-summation oracle. Borders are handled
by edge replication throughout.
"""

import math

import numpy as np

from . import kernels

# Four 5x5 oriented high-pass filters (scaled by 1/16), one per direction.
# Each sums to zero, so constant regions produce no texture response.
_H1 = [
    [0, 0, 0, 0, 0],
    [1, 3, 8, 3, 1],
    [0, 0, 0, 0, 0],
    [-1, -3, -8, -3, -1],
    [0, 0, 0, 0, 0],
]
_H2 = [
    [0, 0, 1, 0, 0],
    [0, 8, 3, 0, 0],
    [1, 3, 0, -3, -1],
    [0, 0, -3, -8, 0],
    [0, 0, -1, 0, 0],
]
_H3 = [
    [0, 0, 1, 0, 0],
    [0, 0, 3, 8, 0],
    [-1, -3, 0, 3, 1],
    [0, -8, -3, 0, 0],
    [0, 0, -1, 0, 0],
]
_H4 = [
    [0, 1, 0, -1, 0],
    [0, 3, 0, -3, 0],
    [0, 8, 0, -8, 0],
    [0, 3, 0, -3, 0],
    [0, 1, 0, -1, 0],
]

# Sobel correlation masks; x is the column (j) axis, y the row (i) axis.
_SOBEL_X = np.array([[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]], dtype=np.float64)
_SOBEL_Y = _SOBEL_X.T


def directional_filter_bank():
    """The four oriented high-pass kernels h1..h4, each 5x5 and zero-sum."""
    return tuple(np.array(m, dtype=np.float64) / 16.0 for m in (_H1, _H2, _H3, _H4))


def convolve2d(img, kernel):
    """Same-size true convolution of a 2-D map with a square odd kernel.

    Borders are replicated. Raises ValueError if the kernel does not fit
    inside the image.
    """
    img = np.asarray(img, dtype=np.float64)
    kernel = np.asarray(kernel, dtype=np.float64)
    if kernel.ndim != 2 or kernel.shape[0] != kernel.shape[1] or kernel.shape[0] % 2 == 0:
        raise ValueError(f"kernel must be square with odd size, got {kernel.shape}")
    if kernel.shape[0] > min(img.shape):
        raise ValueError(f"kernel {kernel.shape[0]} exceeds image {img.shape}")
    return kernels.conv2d(img, kernel)


def correlate2d(img, kernel):
    """Cross-correlation; convolution with the kernel flipped back."""
    return convolve2d(img, np.flip(kernel))


def gaussian_kernel(size, sigma):
    """Isotropic Gaussian kernel of odd `size`, normalized to sum 1."""
    if size < 1 or size % 2 == 0:
        raise ValueError(f"size must be odd and positive, got {size}")
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    r = (size - 1) // 2
    ax = np.arange(-r, r + 1, dtype=np.float64)
    g1 = np.exp(-(ax**2) / (2.0 * sigma * sigma))
    k = np.outer(g1, g1)
    return k / k.sum()


def _hysteresis(strong, candidate):
    """Grow strong seeds through 8-connected candidate pixels to a fixpoint."""
    reach = strong.copy()
    while True:
        grown = reach.copy()
        grown[1:, :] |= reach[:-1, :]
        grown[:-1, :] |= reach[1:, :]
        grown[:, 1:] |= reach[:, :-1]
        grown[:, :-1] |= reach[:, 1:]
        grown[1:, 1:] |= reach[:-1, :-1]
        grown[1:, :-1] |= reach[:-1, 1:]
        grown[:-1, 1:] |= reach[1:, :-1]
        grown[:-1, :-1] |= reach[1:, 1:]
        grown &= candidate
        if np.array_equal(grown, reach):
            return reach
        reach = grown


def canny(img, sigma=1.0, low=0.1, high=0.3):
    """Binary Canny edge map: smooth, Sobel, NMS, hysteresis.

    `low` and `high` are fractions of the maximum gradient magnitude,
    which makes the detector invariant to global brightness and contrast
    scaling. Returns a uint8 map of {0, 1}.
    """
    if not 0.0 <= low < high:
        raise ValueError(f"need 0 <= low < high, got low={low} high={high}")
    img = np.asarray(img, dtype=np.float64)
    ksize = 2 * int(math.ceil(3.0 * sigma)) + 1
    ksize = min(ksize, min(img.shape) - (1 - min(img.shape) % 2))
    if ksize >= 3:
        smoothed = convolve2d(img, gaussian_kernel(ksize, sigma))
    else:
        smoothed = img
    gx = correlate2d(smoothed, _SOBEL_X)
    gy = correlate2d(smoothed, _SOBEL_Y)
    mag = np.hypot(gx, gy)
    gmax = mag.max()
    if gmax <= 0.0:
        return np.zeros(img.shape, dtype=np.uint8)

    # Quantize gradient direction to 4 sectors: 0=E/W, 1=NE/SW, 2=N/S, 3=NW/SE.
    angle = np.mod(np.arctan2(gy, gx), np.pi)
    sector = np.floor((angle + np.pi / 8) / (np.pi / 4)).astype(np.int64) % 4
    padded = np.pad(mag, 1, mode="constant")
    offsets = {0: (0, 1), 1: (1, 1), 2: (1, 0), 3: (1, -1)}
    h, w = mag.shape
    keep = np.zeros((h, w), dtype=bool)
    for s, (di, dj) in offsets.items():
        fwd = padded[1 + di : 1 + di + h, 1 + dj : 1 + dj + w]
        bwd = padded[1 - di : 1 - di + h, 1 - dj : 1 - dj + w]
        # strict on the forward neighbor so symmetric ridges thin to one pixel
        keep |= (sector == s) & (mag > fwd) & (mag >= bwd)

    strong = keep & (mag >= high * gmax)
    candidate = keep & (mag >= low * gmax)
    edges = _hysteresis(strong, candidate)
    return edges.astype(np.uint8)


def resize_bilinear(img, out_h, out_w):
    """Bilinear resize of an (H, W, C) tensor using edge-clamped sampling."""
    img = np.asarray(img, dtype=np.float64)
    h, w = img.shape[:2]
    if out_h < 1 or out_w < 1:
        raise ValueError("output dimensions must be positive")
    ys = (np.arange(out_h) + 0.5) * h / out_h - 0.5
    xs = (np.arange(out_w) + 0.5) * w / out_w - 0.5
    y0 = np.clip(np.floor(ys).astype(np.int64), 0, h - 1)
    x0 = np.clip(np.floor(xs).astype(np.int64), 0, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    x1 = np.minimum(x0 + 1, w - 1)
    fy = np.clip(ys - y0, 0.0, 1.0)[:, None, None]
    fx = np.clip(xs - x0, 0.0, 1.0)[None, :, None]
    tl = img[np.ix_(y0, x0)]
    tr = img[np.ix_(y0, x1)]
    bl = img[np.ix_(y1, x0)]
    br = img[np.ix_(y1, x1)]
    top = tl * (1 - fx) + tr * fx
    bot = bl * (1 - fx) + br * fx
    return top * (1 - fy) + bot * fy
