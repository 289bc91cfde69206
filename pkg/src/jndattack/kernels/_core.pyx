# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: replicate-border 2-D convolution and blockwise transforms."""

import numpy as np

cimport cython


def conv2d(img, kernel):
    """True 2-D convolution (kernel flipped), same-size output, replicate border."""
    cdef double[:, ::1] im = np.ascontiguousarray(img, dtype=np.float64)
    cdef double[:, ::1] ker = np.ascontiguousarray(kernel, dtype=np.float64)
    cdef Py_ssize_t h = im.shape[0], w = im.shape[1]
    cdef Py_ssize_t k = ker.shape[0], r = (k - 1) // 2
    out_arr = np.empty((h, w), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t i, j, a, b, ii, jj
    cdef double acc
    for i in range(h):
        for j in range(w):
            acc = 0.0
            for a in range(k):
                ii = i - a + r
                if ii < 0:
                    ii = 0
                elif ii >= h:
                    ii = h - 1
                for b in range(k):
                    jj = j - b + r
                    if jj < 0:
                        jj = 0
                    elif jj >= w:
                        jj = w - 1
                    acc += ker[a, b] * im[ii, jj]
            out[i, j] = acc
    return out_arr


def block_transform(field, mat):
    """Apply ``mat @ block @ mat.T`` to every non-overlapping BxB tile of ``field``."""
    cdef double[:, ::1] f = np.ascontiguousarray(field, dtype=np.float64)
    cdef double[:, ::1] m = np.ascontiguousarray(mat, dtype=np.float64)
    cdef Py_ssize_t h = f.shape[0], w = f.shape[1], bsz = m.shape[0]
    out_arr = np.empty((h, w), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    tmp_arr = np.empty((bsz, bsz), dtype=np.float64)
    cdef double[:, ::1] tmp = tmp_arr
    cdef Py_ssize_t bi, bj, u, v, n, p, oi, oj
    cdef double acc
    for bi in range(0, h, bsz):
        for bj in range(0, w, bsz):
            # tmp = mat @ block
            for u in range(bsz):
                for n in range(bsz):
                    acc = 0.0
                    for p in range(bsz):
                        acc += m[u, p] * f[bi + p, bj + n]
                    tmp[u, n] = acc
            # out block = tmp @ mat.T
            for u in range(bsz):
                oi = bi + u
                for v in range(bsz):
                    acc = 0.0
                    for n in range(bsz):
                        acc += tmp[u, n] * m[v, n]
                    out[oi, bj + v] = acc
    return out_arr
