# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops: Zhang-Suen thinning and DRD flip sums."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef inline int _pass(unsigned char[:, ::1] img, unsigned char[:, ::1] mark,
                      Py_ssize_t h, Py_ssize_t w, int second) noexcept nogil:
    cdef Py_ssize_t y, x
    cdef int p2, p3, p4, p5, p6, p7, p8, p9, b, a, changed = 0
    for y in range(1, h - 1):
        for x in range(1, w - 1):
            mark[y, x] = 0
            if not img[y, x]:
                continue
            p2 = img[y - 1, x]
            p3 = img[y - 1, x + 1]
            p4 = img[y, x + 1]
            p5 = img[y + 1, x + 1]
            p6 = img[y + 1, x]
            p7 = img[y + 1, x - 1]
            p8 = img[y, x - 1]
            p9 = img[y - 1, x - 1]
            b = p2 + p3 + p4 + p5 + p6 + p7 + p8 + p9
            if b < 2 or b > 6:
                continue
            # 0 -> 1 transitions around the ring (values are 0/1)
            a = (p2 < p3) + (p3 < p4) + (p4 < p5) + (p5 < p6) + (p6 < p7) + (p7 < p8) \
                + (p8 < p9) + (p9 < p2)
            if a != 1:
                continue
            if second:
                if p2 * p4 * p8 or p2 * p6 * p8:
                    continue
            else:
                if p2 * p4 * p6 or p4 * p6 * p8:
                    continue
            mark[y, x] = 1
            changed = 1
    for y in range(1, h - 1):
        for x in range(1, w - 1):
            if mark[y, x]:
                img[y, x] = 0
    return changed


def zhang_suen(mask):
    """Thin a 0/1 uint8 mask; pixels beyond the border count as background."""
    src = np.ascontiguousarray(mask, dtype=np.uint8)
    padded = np.zeros((src.shape[0] + 2, src.shape[1] + 2), dtype=np.uint8)
    padded[1:-1, 1:-1] = src != 0
    cdef unsigned char[:, ::1] img = padded
    cdef unsigned char[:, ::1] mark = np.zeros_like(padded)
    cdef Py_ssize_t h = padded.shape[0], w = padded.shape[1]
    cdef int changed = 1
    with nogil:
        while changed:
            changed = _pass(img, mark, h, w, 0)
            changed = _pass(img, mark, h, w, 1) | changed
    return padded[1:-1, 1:-1].copy()


def drd_flip_sum(gt_padded, pred, weights):
    """Sum of weighted neighbourhood disagreement over every flipped pixel.

    ``gt_padded`` is the ground truth padded by ``r`` on each side, where
    ``weights`` is ``(2r+1, 2r+1)`` and already normalized.
    """
    cdef unsigned char[:, ::1] g = np.ascontiguousarray(gt_padded, dtype=np.uint8)
    cdef unsigned char[:, ::1] p = np.ascontiguousarray(pred, dtype=np.uint8)
    cdef double[:, ::1] wt = np.ascontiguousarray(weights, dtype=np.float64)
    cdef Py_ssize_t h = p.shape[0], w = p.shape[1]
    cdef Py_ssize_t m = wt.shape[0], r = m // 2
    cdef Py_ssize_t y, x, i, j
    cdef double total = 0.0, acc
    cdef int v
    with nogil:
        for y in range(h):
            for x in range(w):
                v = p[y, x]
                if v == g[y + r, x + r]:
                    continue
                acc = 0.0
                for i in range(m):
                    for j in range(m):
                        if g[y + i, x + j] != v:
                            acc = acc + wt[i, j]
                total = total + acc
    return total
