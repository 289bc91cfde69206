"""NumPy implementations of the hot kernels.

Used when the compiled extension is unavailable or when
``JNDATTACK_PURE`` is set. Semantics are identical to ``_core``:
true 2-D convolution with replicate borders, and blockwise two-sided
matrix transforms.
"""

import numpy as np


def conv2d(img, kernel):
    """True 2-D convolution (kernel flipped), same-size output, replicate border."""
    img = np.asarray(img, dtype=np.float64)
    kernel = np.asarray(kernel, dtype=np.float64)
    h, w = img.shape
    k = kernel.shape[0]
    r = (k - 1) // 2
    padded = np.pad(img, r, mode="edge")
    out = np.zeros((h, w), dtype=np.float64)
    # out[i,j] = sum_{a,b} K[a,b] * img[i-a+r, j-b+r], indices clamped to the border
    for a in range(k):
        for b in range(k):
            wgt = kernel[a, b]
            if wgt != 0.0:
                out += wgt * padded[2 * r - a : 2 * r - a + h, 2 * r - b : 2 * r - b + w]
    return out


def block_transform(field, mat):
    """Apply ``mat @ block @ mat.T`` to every non-overlapping BxB tile of ``field``."""
    field = np.asarray(field, dtype=np.float64)
    mat = np.asarray(mat, dtype=np.float64)
    h, w = field.shape
    bsz = mat.shape[0]
    blocks = field.reshape(h // bsz, bsz, w // bsz, bsz)
    out = np.einsum("um,imjn,vn->iujv", mat, blocks, mat, optimize=True)
    return np.ascontiguousarray(out.reshape(h, w))
